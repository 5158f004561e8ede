#include "etabs/cli.hpp"

#include "specs.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace etabs::cli {

namespace {

enum Mask : unsigned {
    kVerify = 1u << 0,
    kSpectrum = 1u << 1,
    kKernel = 1u << 2,
    kPrice = 1u << 3,
    kSusy = 1u << 4,
    kDump = 1u << 5,
    kAll = 0x3f,
    kGrid = kVerify | kSpectrum | kKernel | kPrice | kDump,
    kOperator = kVerify | kSpectrum | kKernel | kDump,
};

struct OptionDef {
    const char* name;
    const char* help;
    unsigned commands;
    bool flag = false;
};

constexpr OptionDef kOptions[] = {
    {"sigma", "volatility (> 0)", kAll},
    {"rate", "risk-free rate (>= 0)", kAll},
    {"n", "interior lattice nodes (>= 3)", kAll},
    {"tau", "time to expiry (> 0)", kGrid},
    {"strike", "strike K (> 0)", kPrice},
    {"spot", "spot S (> 0)", kGrid},
    {"window-sigmas", "window half-width in units of sigma sqrt(tau)", kGrid},
    {"x-min", "explicit lower window edge in log-price", kGrid},
    {"x-max", "explicit upper window edge in log-price", kGrid},
    {"x-center", "window center in log-price", kAll},
    {"align-strike", "shift the lattice so ln K is a node", kPrice, true},
    {"hamiltonian", "bs | h_bs | generalized | eff", kOperator},
    {"potential", "zero | const:c | tanh:c:a | table:FILE", kOperator},
    {"payoff", "call | put | digital", kPrice},
    {"barrier-low", "lower knock-out barrier (spot units)", kPrice},
    {"barrier-high", "upper knock-out barrier (spot units)", kPrice},
    {"W", "superpotential: zero | linear:a | tanh:a | table:FILE", kSusy},
    {"window", "susy window half-width around x-center", kSusy},
    {"x", "log-price of the kernel row (default ln spot)", kKernel},
    {"out", "output file (default stdout)", kAll},
    {"csv", "CSV side output", kPrice | kSusy},
    {"no-timestamp", "omit the timestamp field", kAll, true},
    {"threads", "worker threads (0 = hardware)", kAll},
};

const OptionDef* find_option(const std::string& key) {
    for (const auto& def : kOptions) {
        if (key == def.name) return &def;
    }
    return nullptr;
}

std::string normalize_key(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v)) {
        throw UsageError("--" + key + ": expected a finite number, got '" + text + "'");
    }
    return v;
}

unsigned long parse_count(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw UsageError("--" + key + ": expected a nonnegative integer, got '" + text + "'");
    }
    try {
        return std::stoul(t);
    } catch (const std::out_of_range&) {
        throw UsageError("--" + key + ": value out of range: '" + text + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& text) {
    std::string t = trim(text);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw UsageError("--" + key + ": expected true or false, got '" + text + "'");
}

Command parse_command(const std::string& text) {
    const std::string t = trim(text);
    for (Command c : {Command::verify, Command::spectrum, Command::kernel, Command::price,
                      Command::susy, Command::dump}) {
        if (t == to_string(c)) return c;
    }
    throw UsageError("unknown command '" + text +
                     "' (expected verify, spectrum, kernel, price, susy or dump)");
}

void apply(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "sigma") cfg.market.sigma = parse_double(key, value);
    else if (key == "rate") cfg.market.r = parse_double(key, value);
    else if (key == "n") cfg.n = parse_count(key, value);
    else if (key == "tau") cfg.tau = parse_double(key, value);
    else if (key == "strike") cfg.strike = parse_double(key, value);
    else if (key == "spot") cfg.spot = parse_double(key, value);
    else if (key == "window-sigmas") cfg.window_sigmas = parse_double(key, value);
    else if (key == "x-min") cfg.x_min = parse_double(key, value);
    else if (key == "x-max") cfg.x_max = parse_double(key, value);
    else if (key == "x-center") cfg.x_center = parse_double(key, value);
    else if (key == "align-strike") cfg.align_strike = parse_bool(key, value);
    else if (key == "hamiltonian") cfg.hamiltonian = trim(value);
    else if (key == "potential") cfg.potential = trim(value);
    else if (key == "payoff") cfg.payoff = trim(value);
    else if (key == "barrier-low") cfg.barrier_low = parse_double(key, value);
    else if (key == "barrier-high") cfg.barrier_high = parse_double(key, value);
    else if (key == "W") cfg.W = trim(value);
    else if (key == "window") cfg.window = parse_double(key, value);
    else if (key == "x") cfg.x = parse_double(key, value);
    else if (key == "out") cfg.out = trim(value);
    else if (key == "csv") cfg.csv = trim(value);
    else if (key == "no-timestamp") cfg.timestamp = !parse_bool(key, value);
    else if (key == "threads") cfg.threads = static_cast<unsigned>(parse_count(key, value));
    else throw UsageError("unknown option '" + key + "'");
}

std::string read_file(const std::string& path, const std::string& what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError(what + ": cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void require_file(const std::string& key, const std::string& path) {
    if (path.empty()) throw UsageError("--" + key + ": table: needs a file name");
    if (!std::filesystem::is_regular_file(path)) {
        throw UsageError("--" + key + ": file not found: '" + path + "'");
    }
}

void check(bool ok, const std::string& message) {
    if (!ok) throw UsageError(message);
}

std::string number_text(double v) {
    std::ostringstream ss;
    ss << v;
    return ss.str();
}

}  // namespace

std::string to_string(Command c) {
    switch (c) {
    case Command::verify: return "verify";
    case Command::spectrum: return "spectrum";
    case Command::kernel: return "kernel";
    case Command::price: return "price";
    case Command::susy: return "susy";
    case Command::dump: return "dump";
    }
    return "unknown";
}

namespace detail {

PotentialChoice parse_potential(const std::string& text) {
    PotentialChoice p;
    if (text.empty()) return p;
    if (text == "zero") {
        p.kind = PotentialChoice::Kind::zero;
        return p;
    }
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (head == "const" && colon != std::string::npos) {
        p.kind = PotentialChoice::Kind::constant;
        p.c = parse_double("potential", rest);
        return p;
    }
    if (head == "tanh" && colon != std::string::npos) {
        const auto second = rest.find(':');
        if (second == std::string::npos) {
            throw UsageError("--potential: tanh needs two values, tanh:c:a");
        }
        p.kind = PotentialChoice::Kind::tanh;
        p.c = parse_double("potential", rest.substr(0, second));
        p.a = parse_double("potential", rest.substr(second + 1));
        return p;
    }
    if (head == "table" && colon != std::string::npos) {
        p.kind = PotentialChoice::Kind::table;
        p.path = rest;
        return p;
    }
    throw UsageError("--potential: expected zero, const:c, tanh:c:a or table:FILE, got '" +
                     text + "'");
}

SuperpotentialChoice parse_superpotential(const std::string& text) {
    SuperpotentialChoice w;
    if (text == "zero") return w;
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (head == "linear" && colon != std::string::npos) {
        w.kind = SuperpotentialChoice::Kind::linear;
        w.a = parse_double("W", rest);
        return w;
    }
    if (head == "tanh" && colon != std::string::npos) {
        w.kind = SuperpotentialChoice::Kind::tanh;
        w.a = parse_double("W", rest);
        return w;
    }
    if (head == "table" && colon != std::string::npos) {
        w.kind = SuperpotentialChoice::Kind::table;
        w.path = rest;
        return w;
    }
    throw UsageError("--W: expected zero, linear:a, tanh:a or table:FILE, got '" + text + "'");
}

std::vector<double> read_table(const std::string& path) {
    std::istringstream in(read_file(path, "table"));
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        line = line.substr(0, line.find('#'));
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        std::string field;
        while (fields >> field) values.push_back(parse_double("table " + path, field));
    }
    return values;
}

}  // namespace detail

std::map<std::string, std::string> parse_config_text(std::string_view text) {
    std::map<std::string, std::string> entries;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string body = trim(line.substr(0, line.find('#')));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw UsageError("config line " + std::to_string(number) + ": expected key = value");
        }
        const std::string key = normalize_key(trim(body.substr(0, eq)));
        if (key != "command" && find_option(key) == nullptr) {
            throw UsageError("config line " + std::to_string(number) + ": unknown key '" + key +
                             "'");
        }
        entries[key] = trim(body.substr(eq + 1));
    }
    return entries;
}

RunConfig parse_config(const std::vector<std::string>& args) {
    CLI::App app{"Spectral Black-Scholes operator toolkit", "etabs"};
    app.require_subcommand(0, 1);
    std::string top_config;
    app.add_option("--config", top_config, "flat key = value file; flags override it");

    struct Slot {
        std::string key;
        std::string value;
        bool flag = false;
        bool is_flag = false;
        CLI::Option* option = nullptr;
    };
    struct Sub {
        Command command;
        CLI::App* app;
        std::string config;
        std::deque<Slot> slots;
    };
    const std::pair<Command, const char*> commands[] = {
        {Command::verify, "pseudo-Hermiticity residuals with continuum and recurrence metrics"},
        {Command::spectrum, "eigenvalues and eta-norm residuals as CSV"},
        {Command::kernel, "pricing-kernel row for a given x as CSV"},
        {Command::price, "European or knock-out price as JSON"},
        {Command::susy, "pseudo-supersymmetry residuals and paired spectra"},
        {Command::dump, "operator and metric as JSON"},
    };
    std::deque<Sub> subs;
    for (const auto& [command, description] : commands) {
        const auto bit = 1u << static_cast<unsigned>(command);
        Sub& sub = subs.emplace_back();
        sub.command = command;
        sub.app = app.add_subcommand(to_string(command), description);
        sub.app->add_option("--config", sub.config, "flat key = value file; flags override it");
        for (const auto& def : kOptions) {
            if ((def.commands & bit) == 0) continue;
            Slot& slot = sub.slots.emplace_back();
            slot.key = def.name;
            slot.is_flag = def.flag;
            const std::string flag = std::string("--") + def.name;
            slot.option = def.flag ? sub.app->add_flag(flag, slot.flag, def.help)
                                   : sub.app->add_option(flag, slot.value, def.help);
        }
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        std::ostringstream os;
        app.exit(e, os, os);
        throw HelpRequested{os.str()};
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    const Sub* chosen = nullptr;
    for (const Sub& sub : subs) {
        if (sub.app->parsed()) chosen = &sub;
    }

    RunConfig cfg;
    bool have_command = false;
    std::string config_path = top_config;
    if (chosen != nullptr && !chosen->config.empty()) config_path = chosen->config;
    if (!config_path.empty()) {
        for (const auto& [key, value] : parse_config_text(read_file(config_path, "--config"))) {
            if (key == "command") {
                cfg.command = parse_command(value);
                have_command = true;
            } else {
                apply(cfg, key, value);
            }
        }
    }
    if (chosen != nullptr) {
        cfg.command = chosen->command;
        have_command = true;
        for (const Slot& slot : chosen->slots) {
            if (slot.option->count() == 0) continue;
            apply(cfg, slot.key, slot.is_flag ? "true" : slot.value);
        }
    }
    if (!have_command) {
        throw UsageError("a command is required: verify, spectrum, kernel, price, susy or dump");
    }
    validate(cfg);
    return cfg;
}

void validate(const RunConfig& cfg) {
    const double sigma = cfg.market.sigma;
    check(sigma > 0.0, "--sigma: sigma must be positive (got " + number_text(sigma) + ")");
    check(cfg.market.r >= 0.0,
          "--rate: rate must be nonnegative (got " + number_text(cfg.market.r) + ")");
    check(cfg.n >= 3, "--n: need at least 3 interior nodes (got " + std::to_string(cfg.n) + ")");
    check(cfg.tau > 0.0, "--tau: tau must be positive (got " + number_text(cfg.tau) + ")");
    check(cfg.strike > 0.0, "--strike: strike must be positive (got " + number_text(cfg.strike) + ")");
    check(cfg.spot > 0.0, "--spot: spot must be positive (got " + number_text(cfg.spot) + ")");
    check(cfg.window_sigmas > 0.0, "--window-sigmas: must be positive (got " +
                                       number_text(cfg.window_sigmas) + ")");
    check(cfg.window > 0.0, "--window: must be positive (got " + number_text(cfg.window) + ")");
    check(cfg.x_min.has_value() == cfg.x_max.has_value(),
          "--x-min and --x-max must be given together");
    if (cfg.x_min) {
        check(*cfg.x_min < *cfg.x_max, "--x-min must be below --x-max");
    }
    if (cfg.barrier_low) {
        check(*cfg.barrier_low > 0.0, "--barrier-low: barrier must be positive");
    }
    if (cfg.barrier_high) {
        check(*cfg.barrier_high > 0.0, "--barrier-high: barrier must be positive");
    }
    if (cfg.barrier_low && cfg.barrier_high) {
        check(*cfg.barrier_low < *cfg.barrier_high,
              "--barrier-low must be below --barrier-high");
    }
    const std::vector<std::string> operators = {"bs", "h_bs", "generalized", "eff"};
    check(std::find(operators.begin(), operators.end(), cfg.hamiltonian) != operators.end(),
          "--hamiltonian: expected bs, h_bs, generalized or eff, got '" + cfg.hamiltonian + "'");
    check(cfg.payoff == "call" || cfg.payoff == "put" || cfg.payoff == "digital",
          "--payoff: expected call, put or digital, got '" + cfg.payoff + "'");

    const auto potential = detail::parse_potential(cfg.potential);
    if (potential.kind == detail::PotentialChoice::Kind::table) {
        require_file("potential", potential.path);
    }
    const auto W = detail::parse_superpotential(cfg.W);
    if (W.kind == detail::SuperpotentialChoice::Kind::table) require_file("W", W.path);
}

nlohmann::json to_json(const RunConfig& cfg) {
    const auto optional = [](const std::optional<double>& v) {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    return nlohmann::json{
        {"command", to_string(cfg.command)},
        {"sigma", cfg.market.sigma},
        {"rate", cfg.market.r},
        {"tau", cfg.tau},
        {"strike", cfg.strike},
        {"spot", cfg.spot},
        {"window-sigmas", cfg.window_sigmas},
        {"n", cfg.n},
        {"x-min", optional(cfg.x_min)},
        {"x-max", optional(cfg.x_max)},
        {"x-center", optional(cfg.x_center)},
        {"align-strike", cfg.align_strike},
        {"hamiltonian", cfg.hamiltonian},
        {"potential", cfg.potential},
        {"payoff", cfg.payoff},
        {"barrier-low", optional(cfg.barrier_low)},
        {"barrier-high", optional(cfg.barrier_high)},
        {"W", cfg.W},
        {"window", cfg.window},
        {"x", optional(cfg.x)},
        {"out", cfg.out},
        {"csv", cfg.csv},
        {"no-timestamp", !cfg.timestamp},
        {"threads", cfg.threads},
    };
}

}  // namespace etabs::cli
