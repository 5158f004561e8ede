#pragma once

#include "etabs/hamiltonian.hpp"
#include "etabs/lattice.hpp"
#include "etabs/tridiagonal.hpp"

#include <vector>

namespace etabs {

/// Largest |exponent| a continuum metric may reach on the window.
inline constexpr double kDefaultExponentCap = 300.0;

/// Positive diagonal metric eta defining <f, g>_eta = sum w eta f g.
struct MetricOperator {
    std::vector<double> eta;

    std::size_t size() const noexcept { return eta.size(); }
    double condition_number() const;
    /// Every entry positive and finite.
    bool is_positive() const noexcept;
};

/// Coefficient k in eta = exp(k x) for the plain Black-Scholes operator:
/// k = -(1 - 2r/sigma^2) = 2 * rho_exponent.
double metric_exponent(const MarketParams& params);

/// eta(x) = exp(-(1 - 2r/sigma^2) x). Throws MetricOverflowError when the
/// exponent at either window edge exceeds the cap.
MetricOperator continuum_metric_BS(const MarketParams& params, const Lattice& lat,
                                   double exponent_cap = kDefaultExponentCap);

/// eta(x) = exp((2/sigma^2) CumTrap(V)(x) - x), anchored at x_min.
MetricOperator continuum_metric_generalized(double sigma, const PotentialSpec& V,
                                            const Lattice& lat,
                                            double exponent_cap = kDefaultExponentCap);

/**
 * Discrete detailed-balance metric: eta[i+1] = eta[i] * upper[i] / lower[i]
 * starting from eta_first, so that eta * H is exactly symmetric.
 *
 * Throws SymmetrizationError when an off-diagonal pair is zero or changes
 * sign, and MetricOverflowError when the recurrence leaves double range.
 */
MetricOperator detailed_balance_metric(const TridiagonalOperator& H, double eta_first = 1.0);

/// ||eta H eta^{-1} - H^T||_inf / ||H||_inf; invariant under rescaling eta.
double pseudo_hermiticity_residual(const TridiagonalOperator& H, const MetricOperator& eta);

}  // namespace etabs
