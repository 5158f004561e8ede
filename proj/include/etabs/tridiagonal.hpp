#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace etabs {

/**
 * Real tridiagonal matrix tagged with the grid it was discretized on.
 *
 * upper[i] is the (i, i+1) entry and lower[i] the (i+1, i) entry, so the
 * coefficients in lower[i] belong to row i+1.
 */
struct TridiagonalOperator {
    std::vector<double> diag;
    std::vector<double> upper;
    std::vector<double> lower;
    double x_min = 0.0;
    double dx = 0.0;

    TridiagonalOperator() = default;
    TridiagonalOperator(std::size_t n, double x_min, double dx);

    std::size_t size() const noexcept { return diag.size(); }

    /// Matrix entry (i, j); zero outside the three bands.
    double at(std::size_t i, std::size_t j) const noexcept;

    std::vector<double> apply(std::span<const double> u) const;

    TridiagonalOperator transpose() const;

    /// Max absolute row sum.
    double norm_inf() const noexcept;

    bool is_symmetric() const noexcept { return upper == lower; }

    /// Throws ValidationError on inconsistent band lengths or non-finite entries.
    void validate() const;

    /// Row-major n x n copy; intended for small n.
    std::vector<double> dense() const;

    friend bool operator==(const TridiagonalOperator&, const TridiagonalOperator&) = default;
};

/// Max absolute row sum of (a - b); shapes must match.
double difference_norm_inf(const TridiagonalOperator& a, const TridiagonalOperator& b);

}  // namespace etabs
