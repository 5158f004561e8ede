#include "etabs/pricing.hpp"

#include "etabs/error.hpp"
#include "etabs/metric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace etabs {

namespace {

constexpr double kEdgeTolerance = 1e-6;
constexpr std::size_t kEdgeNodes = 3;

void check_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ValidationError(std::string(what) + " must be positive and finite");
    }
}

// Grid position (0 = x_min, n + 1 = x_max) nearest to x, unclamped.
long grid_position(const Lattice& lat, double x) {
    return std::lround((x - lat.x_min()) / lat.dx());
}

}  // namespace

PayoffSpec PayoffSpec::call(double strike) {
    check_positive(strike, "strike");
    PayoffSpec p;
    p.kind_ = Kind::call;
    p.strike_ = strike;
    return p;
}

PayoffSpec PayoffSpec::put(double strike) {
    check_positive(strike, "strike");
    PayoffSpec p;
    p.kind_ = Kind::put;
    p.strike_ = strike;
    return p;
}

PayoffSpec PayoffSpec::digital(double strike) {
    check_positive(strike, "strike");
    PayoffSpec p;
    p.kind_ = Kind::digital;
    p.strike_ = strike;
    return p;
}

PayoffSpec PayoffSpec::tabulated(std::vector<double> values) {
    PayoffSpec p;
    p.kind_ = Kind::tabulated;
    p.values_ = std::move(values);
    return p;
}

std::vector<double> PayoffSpec::realize(const Lattice& lat) const {
    const std::size_t n = lat.size();
    std::vector<double> g(n);
    switch (kind_) {
    case Kind::call:
        for (std::size_t i = 0; i < n; ++i) g[i] = std::max(std::exp(lat[i]) - strike_, 0.0);
        break;
    case Kind::put:
        for (std::size_t i = 0; i < n; ++i) g[i] = std::max(strike_ - std::exp(lat[i]), 0.0);
        break;
    case Kind::digital:
        for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(lat[i]) > strike_ ? 1.0 : 0.0;
        break;
    case Kind::tabulated:
        if (values_.size() != n) {
            throw ValidationError("tabulated payoff has " + std::to_string(values_.size()) +
                                  " values for a lattice of " + std::to_string(n) + " nodes");
        }
        g = values_;
        break;
    }
    if (!std::all_of(g.begin(), g.end(), [](double v) { return std::isfinite(v) && v >= 0.0; })) {
        throw ValidationError("payoff values must be finite and nonnegative");
    }
    return g;
}

double PriceSurface::at(double x_query) const {
    if (x.empty() || !(x_query > x_min) || !(x_query < x_max)) return 0.0;
    // Knots: window edges (value 0) plus interior nodes.
    const auto it = std::upper_bound(x.begin(), x.end(), x_query);
    const std::size_t hi = static_cast<std::size_t>(it - x.begin());
    const double x_lo = hi == 0 ? x_min : x[hi - 1];
    const double v_lo = hi == 0 ? 0.0 : values[hi - 1];
    const double x_hi = hi == x.size() ? x_max : x[hi];
    const double v_hi = hi == x.size() ? 0.0 : values[hi];
    const double t = (x_query - x_lo) / (x_hi - x_lo);
    return v_lo + t * (v_hi - v_lo);
}

double PriceSurface::at_spot(double spot) const {
    check_positive(spot, "spot");
    return at(std::log(spot));
}

Lattice KnockOutRegion::lattice(const Lattice& full) const {
    const double dx = full.dx();
    return Lattice(full.x_min() + static_cast<double>(lower_wall) * dx,
                   full.x_min() + static_cast<double>(upper_wall) * dx, size());
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double closed_form_call(double spot, double strike, const MarketParams& params, double tau) {
    check_positive(spot, "spot");
    check_positive(strike, "strike");
    check_positive(tau, "tau");
    params.validate();
    const double vol = params.sigma * std::sqrt(tau);
    const double d1 =
        (std::log(spot / strike) + (params.r + 0.5 * params.sigma * params.sigma) * tau) / vol;
    const double d2 = d1 - vol;
    return spot * normal_cdf(d1) - strike * std::exp(-params.r * tau) * normal_cdf(d2);
}

double closed_form_put(double spot, double strike, const MarketParams& params, double tau) {
    check_positive(spot, "spot");
    check_positive(strike, "strike");
    check_positive(tau, "tau");
    params.validate();
    const double vol = params.sigma * std::sqrt(tau);
    const double d1 =
        (std::log(spot / strike) + (params.r + 0.5 * params.sigma * params.sigma) * tau) / vol;
    const double d2 = d1 - vol;
    return strike * std::exp(-params.r * tau) * normal_cdf(-d2) - spot * normal_cdf(-d1);
}

double closed_form_kernel(const MarketParams& params, double tau, double x, double x_prime) {
    check_positive(tau, "tau");
    params.validate();
    const double var = params.sigma * params.sigma * tau;
    const double shift = x_prime - x - (params.r - 0.5 * params.sigma * params.sigma) * tau;
    return std::exp(-params.r * tau) / std::sqrt(2.0 * std::numbers::pi * var) *
           std::exp(-shift * shift / (2.0 * var));
}

PriceSurface price(const SpectralDecomposition& decomp, const Lattice& lat,
                   const PayoffSpec& payoff, double tau) {
    if (decomp.size() != lat.size()) {
        throw ValidationError("decomposition and lattice sizes differ");
    }
    const std::vector<double> g = payoff.realize(lat);

    PriceSurface surface;
    surface.tau = tau;
    surface.x.assign(lat.points().begin(), lat.points().end());
    surface.x_min = lat.x_min();
    surface.x_max = lat.x_max();
    surface.values = evolve(decomp, tau, g);
    surface.warnings = decay_warnings(decomp, tau);

    const double peak = *std::max_element(g.begin(), g.end());
    const std::size_t n = g.size();
    const std::size_t edge = std::min(kEdgeNodes, n);
    bool contaminated = false;
    for (std::size_t i = 0; i < edge; ++i) {
        contaminated |= g[i] > kEdgeTolerance * peak || g[n - 1 - i] > kEdgeTolerance * peak;
    }
    if (peak > 0.0 && contaminated) {
        surface.warnings.push_back(
            "payoff is non-negligible near a window edge; truncation may contaminate prices there");
    }
    return surface;
}

PriceSurface price_european(const MarketParams& params, const PayoffSpec& payoff, double tau,
                            const Lattice& lat, unsigned threads) {
    return price_knock_out(params, payoff, tau, lat, std::nullopt, std::nullopt, threads);
}

KnockOutRegion knock_out_region(const Lattice& lat, std::optional<double> barrier_low,
                                std::optional<double> barrier_high) {
    const long top = static_cast<long>(lat.size()) + 1;
    long low = 0;
    long high = top;
    if (barrier_low) {
        check_positive(*barrier_low, "lower barrier");
        low = grid_position(lat, std::log(*barrier_low));
        if (low >= top) throw ValidationError("lower barrier lies above the lattice window");
        low = std::max(low, 0L);
    }
    if (barrier_high) {
        check_positive(*barrier_high, "upper barrier");
        high = grid_position(lat, std::log(*barrier_high));
        if (high <= 0) throw ValidationError("upper barrier lies below the lattice window");
        high = std::min(high, top);
    }
    if (barrier_low && barrier_high && !(*barrier_low < *barrier_high)) {
        throw ValidationError("barriers must satisfy B_low < B_high");
    }
    if (high - low - 1 < 3) {
        throw ValidationError("barriers leave fewer than three active lattice nodes");
    }
    KnockOutRegion region;
    region.lower_wall = static_cast<std::size_t>(low);
    region.upper_wall = static_cast<std::size_t>(high);
    region.first = region.lower_wall;
    region.last = region.upper_wall - 2;
    return region;
}

TridiagonalOperator knock_out_operator(const MarketParams& params, const Lattice& lat,
                                       const KnockOutRegion& region) {
    return restrict_to(build_H_BS(params, lat), region.first, region.last);
}

KnockOutProblem knock_out_problem(const MarketParams& params, const PayoffSpec& payoff,
                                  const Lattice& lat, std::optional<double> barrier_low,
                                  std::optional<double> barrier_high) {
    const KnockOutRegion region = knock_out_region(lat, barrier_low, barrier_high);
    const Lattice active = region.lattice(lat);
    const std::vector<double> g = payoff.realize(lat);
    return KnockOutProblem{
        region, active, knock_out_operator(params, lat, region),
        std::exp(metric_exponent(params) * active[0]),
        std::vector<double>(g.begin() + region.first, g.begin() + region.last + 1)};
}

PriceSurface embed(const PriceSurface& inner, const Lattice& full, const KnockOutRegion& region) {
    if (inner.values.size() != region.size()) {
        throw ValidationError("surface does not match the knock-out region");
    }
    PriceSurface surface;
    surface.tau = inner.tau;
    surface.x.assign(full.points().begin(), full.points().end());
    surface.x_min = full.x_min();
    surface.x_max = full.x_max();
    surface.values.assign(full.size(), 0.0);
    std::copy(inner.values.begin(), inner.values.end(), surface.values.begin() + region.first);
    surface.warnings = inner.warnings;
    return surface;
}

PriceSurface price_knock_out(const MarketParams& params, const PayoffSpec& payoff, double tau,
                             const Lattice& lat, std::optional<double> barrier_low,
                             std::optional<double> barrier_high, unsigned threads) {
    check_positive(tau, "tau");
    const KnockOutProblem problem =
        knock_out_problem(params, payoff, lat, barrier_low, barrier_high);
    const SpectralDecomposition decomp =
        decompose(problem.H, quadrature_weights(problem.active), problem.eta_anchor, threads);
    const PriceSurface inner =
        price(decomp, problem.active, PayoffSpec::tabulated(problem.payoff), tau);
    return embed(inner, lat, problem.region);
}

PriceSurface price_barrier_down_and_out(const MarketParams& params, double strike,
                                        double barrier, double tau, const Lattice& lat,
                                        unsigned threads) {
    return price_knock_out(params, PayoffSpec::call(strike), tau, lat, barrier, std::nullopt,
                           threads);
}

PriceSurface price_double_knock_out(const MarketParams& params, double strike,
                                    double barrier_low, double barrier_high, double tau,
                                    const Lattice& lat, unsigned threads) {
    if (!(barrier_low < barrier_high)) {
        throw ValidationError("barriers must satisfy B_low < B_high");
    }
    return price_knock_out(params, PayoffSpec::call(strike), tau, lat, barrier_low, barrier_high,
                           threads);
}

}  // namespace etabs
