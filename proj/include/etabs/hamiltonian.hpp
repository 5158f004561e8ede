#pragma once

#include "etabs/lattice.hpp"
#include "etabs/tridiagonal.hpp"

#include <functional>
#include <span>
#include <vector>

namespace etabs {

/// Constant volatility (per sqrt-year) and risk-free rate (per year).
struct MarketParams {
    double sigma = 0.2;
    double r = 0.05;

    /// Throws ValidationError unless sigma > 0 and r is finite and >= 0.
    void validate() const;

    double half_variance() const noexcept { return 0.5 * sigma * sigma; }
    /// Drift coefficient sigma^2/2 - r of the first-derivative term.
    double drift() const noexcept;
    /// -(1/2 - r/sigma^2), the exponent of rho = exp(k x).
    double rho_exponent() const noexcept;
    // Both snap to exactly 0 within a few ulps of r = sigma^2/2: decimal
    // inputs such as sigma = 0.2, r = 0.02 miss the Hermitian limit by an ulp.
};

/**
 * Security-dependent potential V(x), realized node by node on a lattice.
 *
 * A barrier mask is zero on the active interval and equals wall_height
 * elsewhere; it exists to compare finite walls against exact domain
 * restriction.
 */
class PotentialSpec {
public:
    enum class Kind { zero, constant, tabulated, barrier_mask };

    static PotentialSpec zero();
    static PotentialSpec constant(double c);
    static PotentialSpec tabulated(std::vector<double> values);
    static PotentialSpec sampled(const Lattice& lat, const std::function<double(double)>& f);
    static PotentialSpec barrier_mask(double x_low, double x_high, double wall_height = 1e6);

    Kind kind() const noexcept { return kind_; }
    double constant_value() const noexcept { return constant_; }

    /// Values at the lattice nodes; throws ValidationError on a length
    /// mismatch or non-finite entries.
    std::vector<double> realize(const Lattice& lat) const;

private:
    Kind kind_ = Kind::zero;
    double constant_ = 0.0;
    double x_low_ = 0.0;
    double x_high_ = 0.0;
    std::vector<double> values_;
};

/// Positive node values of a similarity transform rho.
struct SimilarityMap {
    std::vector<double> rho;

    std::size_t size() const noexcept { return rho.size(); }
    SimilarityMap inverse() const;
};

/// Cumulative trapezoid integral of node values, anchored at x_min. The
/// first half-cell uses the first node value, so constants integrate exactly.
std::vector<double> cumulative_trapezoid(std::span<const double> values, const Lattice& lat);

/// -(sigma^2/2) d^2/dx^2 + (sigma^2/2 - r) d/dx + r
TridiagonalOperator build_H_BS(const MarketParams& params, const Lattice& lat);

/// -(sigma^2/2) d^2/dx^2 + (sigma^2/2 + r)^2 / (2 sigma^2)
TridiagonalOperator build_h_BS(const MarketParams& params, const Lattice& lat);

/// -(sigma^2/2) d^2/dx^2 + (sigma^2/2 - V) d/dx + V, each row using V at its own node.
TridiagonalOperator build_H_generalized(double sigma, const PotentialSpec& V, const Lattice& lat);

/// H_BS + V
TridiagonalOperator build_H_eff(const MarketParams& params, const PotentialSpec& V,
                                const Lattice& lat);

/// rho = exp(-(1/2 - r/sigma^2) x)
SimilarityMap build_rho(const MarketParams& params, const Lattice& lat);

/// rho = exp(CumTrap(V)/sigma^2 - x/2)
SimilarityMap build_rho_generalized(double sigma, const PotentialSpec& V, const Lattice& lat);

/// rho H rho^{-1}; the diagonal is untouched.
TridiagonalOperator conjugate(const TridiagonalOperator& H, const SimilarityMap& rho);

/// Sub-operator on nodes [first, last] with Dirichlet walls just outside.
TridiagonalOperator restrict_to(const TridiagonalOperator& H, std::size_t first, std::size_t last);

}  // namespace etabs
