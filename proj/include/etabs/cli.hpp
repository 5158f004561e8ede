#pragma once

#include "etabs/hamiltonian.hpp"

#include "json.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace etabs::cli {

/// Bad flags, bad config-file keys or out-of-range values (exit status 2).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown by parse_config for --help; carries the formatted help text.
struct HelpRequested {
    std::string text;
};

enum class Command { verify, spectrum, kernel, price, susy, dump };

std::string to_string(Command c);

struct RunConfig {
    Command command = Command::verify;
    MarketParams market;
    double tau = 0.5;
    double strike = 100.0;
    double spot = 100.0;

    double window_sigmas = 6.0;
    std::size_t n = 2000;
    std::optional<double> x_min;
    std::optional<double> x_max;
    std::optional<double> x_center;
    bool align_strike = false;

    /// bs | h_bs | generalized | eff
    std::string hamiltonian = "bs";
    /// "" (default for the operator) | zero | const:c | tanh:c:a | table:FILE
    std::string potential;
    /// call | put | digital
    std::string payoff = "call";
    std::optional<double> barrier_low;
    std::optional<double> barrier_high;

    /// zero | linear:a | tanh:a | table:FILE
    std::string W = "zero";
    /// Half-width of the susy window around x-center (default 0).
    double window = 4.0;

    /// Kernel row position; defaults to ln(spot).
    std::optional<double> x;

    std::string out;
    std::string csv;
    bool timestamp = true;
    unsigned threads = 0;
};

/// Flat "key = value" lines; '#' starts a comment. Keys are the long flag
/// names without dashes ('_' and '-' are interchangeable).
std::map<std::string, std::string> parse_config_text(std::string_view text);

/// Arguments after the program name. A --config file is applied first and
/// flags given on the command line override it.
RunConfig parse_config(const std::vector<std::string>& args);

/// Checks ranges, enumerations and referenced files; throws UsageError.
void validate(const RunConfig& config);

nlohmann::json to_json(const RunConfig& config);

/// Executes a validated config. Returns the exit status.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_config + run with exit statuses 0 (success), 1 (runtime failure)
/// and 2 (usage error).
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace etabs::cli
