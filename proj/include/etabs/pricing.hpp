#pragma once

#include "etabs/hamiltonian.hpp"
#include "etabs/lattice.hpp"
#include "etabs/spectral.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace etabs {

class PayoffSpec {
public:
    enum class Kind { call, put, digital, tabulated };

    static PayoffSpec call(double strike);
    static PayoffSpec put(double strike);
    /// Pays 1 when S > K.
    static PayoffSpec digital(double strike);
    static PayoffSpec tabulated(std::vector<double> values);

    Kind kind() const noexcept { return kind_; }
    double strike() const noexcept { return strike_; }

    /// g(x_i) on the lattice nodes; values must be finite and nonnegative.
    std::vector<double> realize(const Lattice& lat) const;

private:
    Kind kind_ = Kind::call;
    double strike_ = 0.0;
    std::vector<double> values_;
};

/// Option values C(x_i) at every node of a lattice.
struct PriceSurface {
    double tau = 0.0;
    std::vector<double> x;
    std::vector<double> values;
    double x_min = 0.0;
    double x_max = 0.0;
    std::vector<std::string> warnings;

    /// Linear interpolation in x; the window edges carry zero.
    double at(double x_query) const;
    double at_spot(double spot) const;
};

/// Nodes that survive knock-out walls. Walls sit on grid positions
/// (0 = x_min, n + 1 = x_max) nearest to the barrier log-prices.
struct KnockOutRegion {
    std::size_t first = 0;
    std::size_t last = 0;
    std::size_t lower_wall = 0;
    std::size_t upper_wall = 0;

    std::size_t size() const noexcept { return last - first + 1; }
    Lattice lattice(const Lattice& full) const;
};

/// Standard normal CDF via erfc.
double normal_cdf(double x);

double closed_form_call(double spot, double strike, const MarketParams& params, double tau);
double closed_form_put(double spot, double strike, const MarketParams& params, double tau);

/// Discounted Gaussian transition density of x' given x over tau.
double closed_form_kernel(const MarketParams& params, double tau, double x, double x_prime);

/// exp(-tau H) applied to the payoff through the decomposition's kernel.
PriceSurface price(const SpectralDecomposition& decomp, const Lattice& lat,
                   const PayoffSpec& payoff, double tau);

/// Plain European pricing on the whole window.
PriceSurface price_european(const MarketParams& params, const PayoffSpec& payoff, double tau,
                            const Lattice& lat, unsigned threads = 0);

/// Locate walls for optional lower/upper barrier prices. A barrier beyond
/// the window on its outer side is inactive. Throws ValidationError if the
/// walls leave fewer than three active nodes.
KnockOutRegion knock_out_region(const Lattice& lat, std::optional<double> barrier_low,
                                std::optional<double> barrier_high);

/// H_BS restricted to the active region, i.e. the effective Hamiltonian
/// with an infinite wall outside it.
TridiagonalOperator knock_out_operator(const MarketParams& params, const Lattice& lat,
                                       const KnockOutRegion& region);

/// Everything needed to price on the active region of a knock-out problem.
struct KnockOutProblem {
    KnockOutRegion region;
    Lattice active;
    TridiagonalOperator H;
    /// Detailed-balance anchor: the continuum metric at the first active node.
    double eta_anchor = 1.0;
    /// Payoff restricted to the active nodes.
    std::vector<double> payoff;
};

KnockOutProblem knock_out_problem(const MarketParams& params, const PayoffSpec& payoff,
                                  const Lattice& lat, std::optional<double> barrier_low,
                                  std::optional<double> barrier_high);

/// Place a surface priced on the active region back onto the full lattice,
/// with zeros outside the walls.
PriceSurface embed(const PriceSurface& inner, const Lattice& full, const KnockOutRegion& region);

PriceSurface price_knock_out(const MarketParams& params, const PayoffSpec& payoff, double tau,
                             const Lattice& lat, std::optional<double> barrier_low,
                             std::optional<double> barrier_high, unsigned threads = 0);

/// Down-and-out call with barrier B below the strike.
PriceSurface price_barrier_down_and_out(const MarketParams& params, double strike,
                                        double barrier, double tau, const Lattice& lat,
                                        unsigned threads = 0);

/// Double-knock-out call with walls at B_low and B_high.
PriceSurface price_double_knock_out(const MarketParams& params, double strike,
                                    double barrier_low, double barrier_high, double tau,
                                    const Lattice& lat, unsigned threads = 0);

}  // namespace etabs
