#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace etabs {

/**
 * Uniform grid of interior nodes in log-price x = ln S.
 *
 * The window [x_min, x_max] is split into n + 1 equal cells; unknowns live
 * on the n interior nodes and both window edges carry homogeneous
 * Dirichlet conditions.
 */
class Lattice {
public:
    Lattice(double x_min, double x_max, std::size_t n);

    double x_min() const noexcept { return x_min_; }
    double x_max() const noexcept { return x_max_; }
    std::size_t size() const noexcept { return points_.size(); }
    double dx() const noexcept { return dx_; }

    std::span<const double> points() const noexcept { return points_; }
    double operator[](std::size_t i) const { return points_[i]; }

    /// Index of the node closest to x (clamped to the interior).
    std::size_t nearest_index(double x) const noexcept;

    bool contains(double x) const noexcept { return x > x_min_ && x < x_max_; }

private:
    double x_min_;
    double x_max_;
    double dx_;
    std::vector<double> points_;
};

/// Trapezoid weights restricted to interior nodes (endpoint values vanish).
struct QuadratureWeights {
    std::vector<double> w;

    std::size_t size() const noexcept { return w.size(); }
    double operator[](std::size_t i) const { return w[i]; }
    double total() const noexcept;
};

Lattice make_lattice(double x_min, double x_max, std::size_t n);

/// Window of half-width half_width_sigmas * sigma * sqrt(tau) around x_center.
Lattice centered_window(double x_center, double sigma, double tau,
                        double half_width_sigmas, std::size_t n);

/// Same spacing and node count, shifted by less than dx/2 so that x_anchor
/// lands exactly on a node.
Lattice align_to(const Lattice& lat, double x_anchor);

QuadratureWeights quadrature_weights(const Lattice& lat);

}  // namespace etabs
