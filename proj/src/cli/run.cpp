#include "etabs/cli.hpp"

#include "specs.hpp"

#include "etabs/error.hpp"
#include "etabs/hamiltonian.hpp"
#include "etabs/lattice.hpp"
#include "etabs/metric.hpp"
#include "etabs/pricing.hpp"
#include "etabs/serialize.hpp"
#include "etabs/spectral.hpp"
#include "etabs/susy.hpp"

#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

namespace etabs::cli {

namespace {

constexpr double kDegradedResidual = 1e-10;

class RuntimeFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <class F>
auto stage(const char* module, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const RuntimeFailure&) {
        throw;
    } catch (const std::exception& e) {
        throw RuntimeFailure(std::string(module) + ": " + e.what());
    }
}

std::string num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

class Reporter {
public:
    Reporter(std::ostream& out, std::ostream& err) : out_(out), err_(err) {
        color_ = &err == &std::cerr && std::getenv("ETABS_NO_COLOR") == nullptr &&
                 isatty(fileno(stderr)) != 0;
    }

    std::ostream& out() { return out_; }

    void warn(const std::string& message) {
        err_ << (color_ ? "\x1b[33mwarning:\x1b[0m " : "warning: ") << message << '\n';
    }

    void warn_all(const std::vector<std::string>& messages) {
        for (const auto& m : messages) warn(m);
    }

private:
    std::ostream& out_;
    std::ostream& err_;
    bool color_ = false;
};

void write_artifact(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    stage("output", [&] {
        std::ofstream file(path, std::ios::binary | std::ios::trunc);
        if (!file) throw std::runtime_error("cannot write '" + path + "'");
        file << text;
        if (!file) throw std::runtime_error("write failed for '" + path + "'");
    });
}

/// JSON header shared by every structured output.
nlohmann::json envelope(const RunConfig& cfg, const Lattice& lat) {
    nlohmann::json j;
    j["command"] = to_string(cfg.command);
    j["config"] = to_json(cfg);
    j["lattice"] = {{"x_min", lat.x_min()}, {"x_max", lat.x_max()}, {"n", lat.size()},
                    {"dx", lat.dx()}};
    if (cfg.timestamp) j["timestamp"] = utc_timestamp();
    return j;
}

/// '#' comment block for CSV outputs.
std::string csv_header(const nlohmann::json& meta) {
    std::ostringstream ss;
    for (const auto& [key, value] : meta.items()) ss << "# " << key << ": " << value.dump() << '\n';
    return ss.str();
}

std::string status_of(double recurrence_residual) {
    return recurrence_residual > kDegradedResidual || !std::isfinite(recurrence_residual)
               ? "degraded"
               : "ok";
}

void report_status(Reporter& rep, const std::string& status, double residual) {
    if (status == "degraded") {
        rep.warn("pseudo-Hermiticity residual " + num(residual) + " exceeds " +
                 num(kDegradedResidual) + "; results are marked degraded");
    }
}

Lattice resolve_lattice(const RunConfig& cfg) {
    return stage("lattice", [&] {
        if (cfg.command == Command::susy) {
            const double c = cfg.x_center.value_or(0.0);
            return make_lattice(c - cfg.window, c + cfg.window, cfg.n);
        }
        Lattice lat = cfg.x_min ? make_lattice(*cfg.x_min, *cfg.x_max, cfg.n)
                                : centered_window(cfg.x_center.value_or(std::log(
                                                      cfg.command == Command::price ? cfg.strike
                                                                                    : cfg.spot)),
                                                  cfg.market.sigma, cfg.tau, cfg.window_sigmas,
                                                  cfg.n);
        if (cfg.command == Command::price && cfg.align_strike) {
            lat = align_to(lat, std::log(cfg.strike));
        }
        return lat;
    });
}

PotentialSpec resolve_potential(const RunConfig& cfg, const Lattice& lat) {
    using Kind = detail::PotentialChoice::Kind;
    const auto choice = detail::parse_potential(cfg.potential);
    switch (choice.kind) {
    case Kind::unset:
        return cfg.hamiltonian == "generalized" ? PotentialSpec::constant(cfg.market.r)
                                                : PotentialSpec::zero();
    case Kind::zero: return PotentialSpec::zero();
    case Kind::constant: return PotentialSpec::constant(choice.c);
    case Kind::tanh:
        return PotentialSpec::sampled(lat, [c = choice.c, a = choice.a](double x) {
            return c + a * std::tanh(x);
        });
    case Kind::table: return PotentialSpec::tabulated(detail::read_table(choice.path));
    }
    return PotentialSpec::zero();
}

struct ResolvedOperator {
    std::string name;
    TridiagonalOperator H;
    std::optional<MetricOperator> continuum;
    std::string continuum_note;
    MetricOperator recurrence;
};

ResolvedOperator resolve_operator(const RunConfig& cfg, const Lattice& lat) {
    ResolvedOperator op;
    const PotentialSpec V = stage("hamiltonian", [&] { return resolve_potential(cfg, lat); });
    op.H = stage("hamiltonian", [&] {
        if (cfg.hamiltonian == "h_bs") return build_h_BS(cfg.market, lat);
        if (cfg.hamiltonian == "generalized") return build_H_generalized(cfg.market.sigma, V, lat);
        if (cfg.hamiltonian == "eff") return build_H_eff(cfg.market, V, lat);
        return build_H_BS(cfg.market, lat);
    });
    op.name = cfg.hamiltonian == "h_bs"          ? "h_BS"
              : cfg.hamiltonian == "generalized" ? "H_generalized"
              : cfg.hamiltonian == "eff"         ? "H_eff"
                                                 : "H_BS";
    try {
        if (cfg.hamiltonian == "h_bs") {
            op.continuum = MetricOperator{std::vector<double>(lat.size(), 1.0)};
        } else if (cfg.hamiltonian == "generalized") {
            op.continuum = continuum_metric_generalized(cfg.market.sigma, V, lat);
        } else {
            op.continuum = continuum_metric_BS(cfg.market, lat);
        }
    } catch (const MetricOverflowError& e) {
        op.continuum_note = e.what();
    }
    const double anchor = op.continuum ? op.continuum->eta.front() : 1.0;
    op.recurrence = stage("metric", [&] { return detailed_balance_metric(op.H, anchor); });
    return op;
}

nlohmann::json metric_summary(const MetricOperator& m) {
    const auto [lo, hi] = std::minmax_element(m.eta.begin(), m.eta.end());
    return {{"eta_min", *lo}, {"eta_max", *hi}, {"condition_number", m.condition_number()}};
}

struct Certificate {
    double pseudo_hermiticity = 0.0;
    double eta_gram = 0.0;
    std::string status;

    nlohmann::json json() const {
        return {{"pseudo_hermiticity", pseudo_hermiticity}, {"eta_gram", eta_gram}};
    }
};

Certificate certify(const TridiagonalOperator& H, const MetricOperator& eta,
                    const SpectralDecomposition& decomp, unsigned threads) {
    Certificate c;
    c.pseudo_hermiticity = stage("metric", [&] { return pseudo_hermiticity_residual(H, eta); });
    c.eta_gram = stage("spectral", [&] { return eta_gram_residual(decomp, threads); });
    c.status = status_of(c.pseudo_hermiticity);
    return c;
}

SpectralDecomposition decompose_operator(const ResolvedOperator& op, const Lattice& lat,
                                         unsigned threads) {
    return stage("spectral",
                 [&] { return decompose(op.H, op.recurrence, quadrature_weights(lat), threads); });
}

int run_verify(const RunConfig& cfg, Reporter& rep) {
    const Lattice lat = resolve_lattice(cfg);
    const ResolvedOperator op = resolve_operator(cfg, lat);
    const double recurrence = pseudo_hermiticity_residual(op.H, op.recurrence);
    const double continuum = op.continuum
                                 ? pseudo_hermiticity_residual(op.H, *op.continuum)
                                 : std::numeric_limits<double>::quiet_NaN();
    const SpectralDecomposition decomp = decompose_operator(op, lat, cfg.threads);
    const Certificate cert = certify(op.H, op.recurrence, decomp, cfg.threads);

    std::ostringstream table;
    table << "operator " << op.name << "  n " << lat.size() << "  dx " << num(lat.dx())
          << "  window [" << num(lat.x_min()) << ", " << num(lat.x_max()) << "]\n";
    table << std::left << std::setw(12) << "metric" << std::right << std::setw(14) << "residual"
          << std::setw(14) << "eta_min" << std::setw(14) << "eta_max" << std::setw(14)
          << "condition" << '\n';
    const auto row = [&](const char* label, double residual, const MetricOperator* m) {
        table << std::left << std::setw(12) << label << std::right << std::scientific
              << std::setprecision(6) << std::setw(14) << residual;
        if (m != nullptr) {
            const auto [lo, hi] = std::minmax_element(m->eta.begin(), m->eta.end());
            table << std::setw(14) << *lo << std::setw(14) << *hi << std::setw(14)
                  << m->condition_number();
        } else {
            table << std::setw(14) << "-" << std::setw(14) << "-" << std::setw(14) << "-";
        }
        table << std::defaultfloat << '\n';
    };
    row("continuum", continuum, op.continuum ? &*op.continuum : nullptr);
    row("recurrence", recurrence, &op.recurrence);
    table << "eta_gram " << std::scientific << std::setprecision(6) << cert.eta_gram
          << "  status " << cert.status << '\n';
    rep.out() << table.str();

    if (!op.continuum_note.empty()) rep.warn("continuum metric: " + op.continuum_note);
    report_status(rep, cert.status, recurrence);

    if (!cfg.out.empty()) {
        nlohmann::json j = envelope(cfg, lat);
        j["operator"] = op.name;
        j["residuals"] = cert.json();
        j["residuals"]["continuum"] = op.continuum ? nlohmann::json(continuum) : nullptr;
        j["residuals"]["recurrence"] = recurrence;
        j["metrics"]["recurrence"] = metric_summary(op.recurrence);
        j["metrics"]["continuum"] =
            op.continuum ? metric_summary(*op.continuum) : nlohmann::json(op.continuum_note);
        j["status"] = cert.status;
        write_artifact(cfg.out, j.dump(2) + "\n", rep.out());
    }
    return 0;
}

int run_spectrum(const RunConfig& cfg, Reporter& rep) {
    const Lattice lat = resolve_lattice(cfg);
    const ResolvedOperator op = resolve_operator(cfg, lat);
    const SpectralDecomposition decomp = decompose_operator(op, lat, cfg.threads);
    const Certificate cert = certify(op.H, op.recurrence, decomp, cfg.threads);
    const std::vector<double> norms = eta_norm_residuals(decomp);

    nlohmann::json meta = envelope(cfg, lat);
    meta["operator"] = op.name;
    meta["residuals"] = cert.json();
    meta["status"] = cert.status;
    std::ostringstream csv;
    csv << csv_header(meta) << "mode,eigenvalue,eta_norm_residual\n";
    for (std::size_t k = 0; k < decomp.size(); ++k) {
        csv << k << ',' << num(decomp.eigenvalues()[k]) << ',' << num(norms[k]) << '\n';
    }
    write_artifact(cfg.out, csv.str(), rep.out());
    report_status(rep, cert.status, cert.pseudo_hermiticity);
    return 0;
}

int run_kernel(const RunConfig& cfg, Reporter& rep) {
    const Lattice lat = resolve_lattice(cfg);
    const double x = cfg.x.value_or(std::log(cfg.spot));
    if (!lat.contains(x)) {
        throw RuntimeFailure("kernel: x = " + num(x) + " lies outside the window [" +
                             num(lat.x_min()) + ", " + num(lat.x_max()) + "]");
    }
    const ResolvedOperator op = resolve_operator(cfg, lat);
    const SpectralDecomposition decomp = decompose_operator(op, lat, cfg.threads);
    const Certificate cert = certify(op.H, op.recurrence, decomp, cfg.threads);
    const std::size_t i = lat.nearest_index(x);
    const std::vector<double> row =
        stage("spectral", [&] { return kernel_row(decomp, cfg.tau, i); });
    const auto warnings = decay_warnings(decomp, cfg.tau);

    nlohmann::json meta = envelope(cfg, lat);
    meta["operator"] = op.name;
    meta["row"] = {{"index", i}, {"x", lat[i]}};
    meta["residuals"] = cert.json();
    meta["status"] = cert.status;
    meta["warnings"] = warnings;
    std::ostringstream csv;
    csv << csv_header(meta) << "x_prime,density\n";
    const auto& w = decomp.weights();
    for (std::size_t j = 0; j < lat.size(); ++j) {
        csv << num(lat[j]) << ',' << num(row[j] / w[j]) << '\n';
    }
    write_artifact(cfg.out, csv.str(), rep.out());
    rep.warn_all(warnings);
    report_status(rep, cert.status, cert.pseudo_hermiticity);
    return 0;
}

PayoffSpec resolve_payoff(const RunConfig& cfg) {
    if (cfg.payoff == "put") return PayoffSpec::put(cfg.strike);
    if (cfg.payoff == "digital") return PayoffSpec::digital(cfg.strike);
    return PayoffSpec::call(cfg.strike);
}

int run_price(const RunConfig& cfg, Reporter& rep) {
    const Lattice lat = resolve_lattice(cfg);
    const PayoffSpec payoff = resolve_payoff(cfg);
    const KnockOutProblem problem = stage("pricing", [&] {
        return knock_out_problem(cfg.market, payoff, lat, cfg.barrier_low, cfg.barrier_high);
    });
    const MetricOperator eta =
        stage("metric", [&] { return detailed_balance_metric(problem.H, problem.eta_anchor); });
    const SpectralDecomposition decomp = stage("spectral", [&] {
        return decompose(problem.H, eta, quadrature_weights(problem.active), cfg.threads);
    });
    const Certificate cert = certify(problem.H, eta, decomp, cfg.threads);
    const PriceSurface surface = stage("pricing", [&] {
        return embed(price(decomp, problem.active, PayoffSpec::tabulated(problem.payoff), cfg.tau),
                     lat, problem.region);
    });

    std::vector<std::string> warnings = surface.warnings;
    const double x_spot = std::log(cfg.spot);
    if (!lat.contains(x_spot)) {
        warnings.push_back("spot lies outside the lattice window; price reported as 0");
    }
    const double value = surface.at(x_spot);

    nlohmann::json j = envelope(cfg, lat);
    j["price"] = value;
    j["spot"] = cfg.spot;
    j["params"] = {{"sigma", cfg.market.sigma},
                   {"rate", cfg.market.r},
                   {"strike", cfg.strike},
                   {"tau", cfg.tau},
                   {"payoff", cfg.payoff},
                   {"barrier_low", to_json(cfg)["barrier-low"]},
                   {"barrier_high", to_json(cfg)["barrier-high"]}};
    j["n"] = lat.size();
    j["dx"] = lat.dx();
    j["active_nodes"] = {{"first", problem.region.first}, {"last", problem.region.last}};
    j["residuals"] = cert.json();
    j["status"] = cert.status;
    j["warnings"] = warnings;
    write_artifact(cfg.out, j.dump(2) + "\n", rep.out());
    if (!cfg.out.empty()) rep.out() << "price " << num(value) << '\n';

    if (!cfg.csv.empty()) {
        nlohmann::json meta = envelope(cfg, lat);
        meta["residuals"] = cert.json();
        meta["status"] = cert.status;
        std::ostringstream csv;
        csv << csv_header(meta) << "x,S,C\n";
        for (std::size_t i = 0; i < lat.size(); ++i) {
            csv << num(lat[i]) << ',' << num(std::exp(lat[i])) << ',' << num(surface.values[i])
                << '\n';
        }
        write_artifact(cfg.csv, csv.str(), rep.out());
    }
    rep.warn_all(warnings);
    report_status(rep, cert.status, cert.pseudo_hermiticity);
    return 0;
}

Superpotential resolve_superpotential(const RunConfig& cfg, const Lattice& lat) {
    using Kind = detail::SuperpotentialChoice::Kind;
    const auto choice = detail::parse_superpotential(cfg.W);
    const double a = choice.a;
    switch (choice.kind) {
    case Kind::zero:
        return Superpotential::analytic(lat, [](double) { return 0.0; },
                                        [](double) { return 0.0; });
    case Kind::linear:
        return Superpotential::analytic(lat, [a](double x) { return a * x; },
                                        [a](double) { return a; });
    case Kind::tanh:
        return Superpotential::analytic(
            lat, [a](double x) { return std::tanh(a * x); },
            [a](double x) {
                const double c = std::cosh(a * x);
                return a / (c * c);
            });
    case Kind::table: return Superpotential::from_values(lat, detail::read_table(choice.path));
    }
    return {};
}

int run_susy(const RunConfig& cfg, Reporter& rep) {
    const Lattice lat = resolve_lattice(cfg);
    const Superpotential W = stage("susy", [&] { return resolve_superpotential(cfg, lat); });
    const MetricOperator eta = stage("metric", [&] { return continuum_metric_BS(cfg.market, lat); });
    const SusySystem sys = stage("susy", [&] { return factorized_system(cfg.market, W, lat, eta); });
    const SusyReport report = stage("susy", [&] { return verify_susy(sys); });
    const SpectralDecomposition decomp = stage("spectral", [&] {
        return decompose(sys.H_eff, sys.eta, quadrature_weights(lat), cfg.threads);
    });
    const Certificate cert = certify(sys.H_eff, sys.eta, decomp, cfg.threads);

    nlohmann::json j = envelope(cfg, lat);
    j["delta"] = sys.delta;
    j["residuals"] = cert.json();
    j["residuals"].update({{"anticommutator", report.anticommutator},
                           {"commutator_Q", report.commutator_Q},
                           {"commutator_Q_sharp", report.commutator_Q_sharp},
                           {"nilpotency_Q", report.nilpotency_Q},
                           {"nilpotency_Q_sharp", report.nilpotency_Q_sharp},
                           {"pseudo_hermiticity_super", report.pseudo_hermiticity_super},
                           {"pseudo_hermiticity_eff", report.pseudo_hermiticity_eff},
                           {"pseudo_hermiticity_partner", report.pseudo_hermiticity_partner},
                           {"intertwining", report.intertwining},
                           {"factorization", report.factorization},
                           {"pairing", report.pairing}});
    j["min_eigenvalue_eff"] = report.min_eigenvalue_eff;
    j["near_zero_eff"] = report.near_zero_eff;
    j["near_zero_partner"] = report.near_zero_partner;
    j["eta_constant"] = report.eta_constant;
    j["a_sharp_is_transpose"] = report.a_sharp_is_transpose;
    j["classical_susy"] = report.classical_susy;
    j["status"] = cert.status;
    write_artifact(cfg.out, j.dump(2) + "\n", rep.out());
    if (!cfg.out.empty()) {
        rep.out() << "classical_susy " << (report.classical_susy ? "true" : "false") << '\n';
    }

    if (!cfg.csv.empty()) {
        nlohmann::json meta = envelope(cfg, lat);
        meta["delta"] = sys.delta;
        meta["residuals"] = j["residuals"];
        meta["status"] = cert.status;
        std::ostringstream csv;
        csv << csv_header(meta) << "mode,eff,partner\n";
        for (std::size_t k = 0; k < report.spectrum_eff.size(); ++k) {
            csv << k << ',' << num(report.spectrum_eff[k] + sys.delta) << ','
                << num(report.spectrum_partner[k] + sys.delta) << '\n';
        }
        write_artifact(cfg.csv, csv.str(), rep.out());
    }
    report_status(rep, cert.status, cert.pseudo_hermiticity);
    return 0;
}

int run_dump(const RunConfig& cfg, Reporter& rep) {
    const Lattice lat = resolve_lattice(cfg);
    const ResolvedOperator op = resolve_operator(cfg, lat);
    const SpectralDecomposition decomp = decompose_operator(op, lat, cfg.threads);
    const Certificate cert = certify(op.H, op.recurrence, decomp, cfg.threads);

    nlohmann::json j = envelope(cfg, lat);
    j["operator_name"] = op.name;
    j["operator"] = to_json(op.H);
    j["metric"] = to_json(op.recurrence);
    j["continuum_metric"] = op.continuum ? to_json(*op.continuum) : nlohmann::json(nullptr);
    j["residuals"] = cert.json();
    j["status"] = cert.status;
    write_artifact(cfg.out, j.dump(2) + "\n", rep.out());
    if (!op.continuum_note.empty()) rep.warn("continuum metric: " + op.continuum_note);
    report_status(rep, cert.status, cert.pseudo_hermiticity);
    return 0;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    Reporter rep(out, err);
    switch (config.command) {
    case Command::verify: return run_verify(config, rep);
    case Command::spectrum: return run_spectrum(config, rep);
    case Command::kernel: return run_kernel(config, rep);
    case Command::price: return run_price(config, rep);
    case Command::susy: return run_susy(config, rep);
    case Command::dump: return run_dump(config, rep);
    }
    return 1;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        cfg = parse_config(std::vector<std::string>(argv + 1, argv + argc));
    } catch (const HelpRequested& help) {
        out << help.text;
        return 0;
    } catch (const UsageError& e) {
        err << "etabs: usage error: " << e.what() << "\nRun 'etabs --help' for usage.\n";
        return 2;
    }
    try {
        return run(cfg, out, err);
    } catch (const std::exception& e) {
        err << "etabs: error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace etabs::cli
