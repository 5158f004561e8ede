#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace etabs {

/// Bad input: degenerate intervals, nonpositive volatility, mismatched sizes.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A tridiagonal operator whose off-diagonal pair at `index` cannot be
/// balanced by a positive diagonal metric (zero entry or sign change).
class SymmetrizationError : public std::runtime_error {
public:
    SymmetrizationError(std::size_t index, double dx, double dx_bound);

    std::size_t index() const noexcept { return index_; }
    double dx() const noexcept { return dx_; }
    /// Largest spacing for which the pair would be sign-consistent.
    double dx_bound() const noexcept { return dx_bound_; }

private:
    std::size_t index_;
    double dx_;
    double dx_bound_;
};

/// Metric exponent too large to represent on the requested window.
class MetricOverflowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative eigensolver failed to deflate an eigenvalue.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(std::size_t index, int iterations);

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

}  // namespace etabs
