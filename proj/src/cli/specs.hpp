#pragma once

#include <string>
#include <vector>

namespace etabs::cli::detail {

/// --potential: "" | zero | const:c | tanh:c:a (V = c + a tanh x) | table:FILE
struct PotentialChoice {
    enum class Kind { unset, zero, constant, tanh, table };
    Kind kind = Kind::unset;
    double c = 0.0;
    double a = 0.0;
    std::string path;
};

/// --W: zero | linear:a (W = a x) | tanh:a (W = tanh(a x)) | table:FILE
struct SuperpotentialChoice {
    enum class Kind { zero, linear, tanh, table };
    Kind kind = Kind::zero;
    double a = 0.0;
    std::string path;
};

PotentialChoice parse_potential(const std::string& text);
SuperpotentialChoice parse_superpotential(const std::string& text);

/// Whitespace- or comma-separated numbers; '#' starts a comment.
std::vector<double> read_table(const std::string& path);

}  // namespace etabs::cli::detail
