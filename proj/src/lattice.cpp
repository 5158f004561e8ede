#include "etabs/lattice.hpp"

#include "etabs/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace etabs {

Lattice::Lattice(double x_min, double x_max, std::size_t n) : x_min_(x_min), x_max_(x_max) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max)) {
        throw ValidationError("lattice bounds must be finite");
    }
    if (!(x_min < x_max)) {
        throw ValidationError("lattice requires x_min < x_max (got " + std::to_string(x_min) +
                              ", " + std::to_string(x_max) + ")");
    }
    if (n < 3) {
        throw ValidationError("lattice requires at least 3 interior points (got " +
                              std::to_string(n) + ")");
    }
    dx_ = (x_max - x_min) / static_cast<double>(n + 1);
    points_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        points_[i] = x_min + static_cast<double>(i + 1) * dx_;
    }
}

std::size_t Lattice::nearest_index(double x) const noexcept {
    const double pos = std::round((x - x_min_) / dx_) - 1.0;
    if (pos <= 0.0) return 0;
    const auto last = static_cast<double>(points_.size() - 1);
    return static_cast<std::size_t>(std::min(pos, last));
}

double QuadratureWeights::total() const noexcept {
    return std::accumulate(w.begin(), w.end(), 0.0);
}

Lattice make_lattice(double x_min, double x_max, std::size_t n) {
    return Lattice(x_min, x_max, n);
}

Lattice centered_window(double x_center, double sigma, double tau, double half_width_sigmas,
                        std::size_t n) {
    if (!(sigma > 0.0)) throw ValidationError("window requires sigma > 0");
    if (!(tau > 0.0)) throw ValidationError("window requires tau > 0");
    if (!(half_width_sigmas > 0.0)) throw ValidationError("window requires a positive half-width");
    const double half = half_width_sigmas * sigma * std::sqrt(tau);
    return Lattice(x_center - half, x_center + half, n);
}

Lattice align_to(const Lattice& lat, double x_anchor) {
    const double dx = lat.dx();
    const double offset = (x_anchor - lat.x_min()) / dx;
    const double shift = (offset - std::round(offset)) * dx;
    return Lattice(lat.x_min() + shift, lat.x_max() + shift, lat.size());
}

QuadratureWeights quadrature_weights(const Lattice& lat) {
    return QuadratureWeights{std::vector<double>(lat.size(), lat.dx())};
}

}  // namespace etabs
