#include "etabs/hamiltonian.hpp"

#include "etabs/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace etabs {

void MarketParams::validate() const {
    if (!std::isfinite(sigma) || !(sigma > 0.0)) {
        throw ValidationError("sigma must be positive and finite");
    }
    if (!std::isfinite(r) || r < 0.0) {
        throw ValidationError("rate must be finite and nonnegative");
    }
}

namespace {

constexpr double kHermitianSnap = 4.0 * std::numeric_limits<double>::epsilon();

}  // namespace

double MarketParams::drift() const noexcept {
    const double h = half_variance();
    const double d = h - r;
    return std::abs(d) <= kHermitianSnap * h ? 0.0 : d;
}

double MarketParams::rho_exponent() const noexcept {
    const double k = -(0.5 - r / (sigma * sigma));
    return std::abs(k) <= kHermitianSnap ? 0.0 : k;
}

PotentialSpec PotentialSpec::zero() { return PotentialSpec{}; }

PotentialSpec PotentialSpec::constant(double c) {
    PotentialSpec v;
    v.kind_ = Kind::constant;
    v.constant_ = c;
    return v;
}

PotentialSpec PotentialSpec::tabulated(std::vector<double> values) {
    PotentialSpec v;
    v.kind_ = Kind::tabulated;
    v.values_ = std::move(values);
    return v;
}

PotentialSpec PotentialSpec::sampled(const Lattice& lat, const std::function<double(double)>& f) {
    std::vector<double> values(lat.size());
    std::transform(lat.points().begin(), lat.points().end(), values.begin(), f);
    return tabulated(std::move(values));
}

PotentialSpec PotentialSpec::barrier_mask(double x_low, double x_high, double wall_height) {
    if (!(x_low < x_high)) throw ValidationError("barrier mask requires x_low < x_high");
    PotentialSpec v;
    v.kind_ = Kind::barrier_mask;
    v.x_low_ = x_low;
    v.x_high_ = x_high;
    v.constant_ = wall_height;
    return v;
}

std::vector<double> PotentialSpec::realize(const Lattice& lat) const {
    const std::size_t n = lat.size();
    std::vector<double> out(n, 0.0);
    switch (kind_) {
    case Kind::zero:
        break;
    case Kind::constant:
        std::fill(out.begin(), out.end(), constant_);
        break;
    case Kind::tabulated:
        if (values_.size() != n) {
            throw ValidationError("tabulated potential has " + std::to_string(values_.size()) +
                                  " values for a lattice of " + std::to_string(n) + " nodes");
        }
        out = values_;
        break;
    case Kind::barrier_mask:
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = (lat[i] > x_low_ && lat[i] < x_high_) ? 0.0 : constant_;
        }
        break;
    }
    if (!std::all_of(out.begin(), out.end(), [](double v) { return std::isfinite(v); })) {
        throw ValidationError("potential has non-finite values");
    }
    return out;
}

SimilarityMap SimilarityMap::inverse() const {
    SimilarityMap inv{rho};
    for (double& v : inv.rho) v = 1.0 / v;
    return inv;
}

std::vector<double> cumulative_trapezoid(std::span<const double> values, const Lattice& lat) {
    if (values.size() != lat.size()) throw ValidationError("cumulative integral size mismatch");
    const double dx = lat.dx();
    std::vector<double> out(values.size());
    double acc = dx * values[0];
    out[0] = acc;
    for (std::size_t i = 1; i < values.size(); ++i) {
        acc += 0.5 * dx * (values[i - 1] + values[i]);
        out[i] = acc;
    }
    return out;
}

namespace {

// Centered stencil for -(s2/2) u'' + b_i u' + c_i u with per-node b and c.
TridiagonalOperator diffusion_drift(double sigma, std::span<const double> drift,
                                    std::span<const double> shift, const Lattice& lat) {
    const std::size_t n = lat.size();
    const double dx = lat.dx();
    const double s2 = sigma * sigma;
    const double second = s2 / (2.0 * dx * dx);
    TridiagonalOperator H(n, lat.x_min(), dx);
    for (std::size_t i = 0; i < n; ++i) {
        H.diag[i] = s2 / (dx * dx) + shift[i];
        if (i + 1 < n) {
            H.upper[i] = -second + drift[i] / (2.0 * dx);
            H.lower[i] = -second - drift[i + 1] / (2.0 * dx);
        }
    }
    return H;
}

}  // namespace

TridiagonalOperator build_H_BS(const MarketParams& params, const Lattice& lat) {
    params.validate();
    const std::vector<double> drift(lat.size(), params.drift());
    const std::vector<double> shift(lat.size(), params.r);
    return diffusion_drift(params.sigma, drift, shift, lat);
}

TridiagonalOperator build_h_BS(const MarketParams& params, const Lattice& lat) {
    params.validate();
    const double s2 = params.sigma * params.sigma;
    // (sigma^2/2 + r)^2 / (2 sigma^2) written as drift^2 / (2 sigma^2) + r,
    // which is exactly r in the Hermitian limit.
    const double b = params.drift();
    const std::vector<double> drift(lat.size(), 0.0);
    const std::vector<double> shift(lat.size(), b * b / (2.0 * s2) + params.r);
    return diffusion_drift(params.sigma, drift, shift, lat);
}

TridiagonalOperator build_H_generalized(double sigma, const PotentialSpec& V, const Lattice& lat) {
    MarketParams{sigma, 0.0}.validate();
    const std::vector<double> v = V.realize(lat);
    std::vector<double> drift(v.size());
    std::transform(v.begin(), v.end(), drift.begin(),
                   [&](double vi) { return 0.5 * sigma * sigma - vi; });
    return diffusion_drift(sigma, drift, v, lat);
}

TridiagonalOperator build_H_eff(const MarketParams& params, const PotentialSpec& V,
                                const Lattice& lat) {
    TridiagonalOperator H = build_H_BS(params, lat);
    const std::vector<double> v = V.realize(lat);
    for (std::size_t i = 0; i < v.size(); ++i) H.diag[i] += v[i];
    return H;
}

SimilarityMap build_rho(const MarketParams& params, const Lattice& lat) {
    params.validate();
    const double k = params.rho_exponent();
    SimilarityMap m;
    m.rho.reserve(lat.size());
    for (double x : lat.points()) m.rho.push_back(std::exp(k * x));
    return m;
}

SimilarityMap build_rho_generalized(double sigma, const PotentialSpec& V, const Lattice& lat) {
    MarketParams{sigma, 0.0}.validate();
    const std::vector<double> integral = cumulative_trapezoid(V.realize(lat), lat);
    const double inv_s2 = 1.0 / (sigma * sigma);
    SimilarityMap m;
    m.rho.resize(lat.size());
    for (std::size_t i = 0; i < lat.size(); ++i) {
        m.rho[i] = std::exp(inv_s2 * integral[i] - 0.5 * lat[i]);
    }
    return m;
}

TridiagonalOperator conjugate(const TridiagonalOperator& H, const SimilarityMap& rho) {
    if (rho.size() != H.size()) throw ValidationError("similarity map size mismatch");
    TridiagonalOperator out = H;
    for (std::size_t i = 0; i + 1 < H.size(); ++i) {
        out.upper[i] = rho.rho[i] * H.upper[i] / rho.rho[i + 1];
        out.lower[i] = rho.rho[i + 1] * H.lower[i] / rho.rho[i];
    }
    return out;
}

TridiagonalOperator restrict_to(const TridiagonalOperator& H, std::size_t first, std::size_t last) {
    if (first > last || last >= H.size()) throw ValidationError("invalid restriction range");
    TridiagonalOperator out;
    out.x_min = H.x_min + static_cast<double>(first) * H.dx;
    out.dx = H.dx;
    out.diag.assign(H.diag.begin() + first, H.diag.begin() + last + 1);
    out.upper.assign(H.upper.begin() + first, H.upper.begin() + last);
    out.lower.assign(H.lower.begin() + first, H.lower.begin() + last);
    return out;
}

}  // namespace etabs
