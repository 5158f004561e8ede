#include "etabs/metric.hpp"

#include "etabs/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace etabs {

namespace {

void check_exponent(double exponent, double cap, double x) {
    if (!(std::abs(exponent) <= cap)) {
        std::ostringstream os;
        os << "metric overflow: shrink window or renormalize (exponent " << exponent << " at x = "
           << x << " exceeds cap " << cap << ")";
        throw MetricOverflowError(os.str());
    }
}

}  // namespace

double MetricOperator::condition_number() const {
    if (eta.empty()) return 1.0;
    const auto [lo, hi] = std::minmax_element(eta.begin(), eta.end());
    return *hi / *lo;
}

bool MetricOperator::is_positive() const noexcept {
    return std::all_of(eta.begin(), eta.end(),
                       [](double v) { return v > 0.0 && std::isfinite(v); });
}

double metric_exponent(const MarketParams& params) {
    return 2.0 * params.rho_exponent();
}

MetricOperator continuum_metric_BS(const MarketParams& params, const Lattice& lat,
                                   double exponent_cap) {
    params.validate();
    const double k = metric_exponent(params);
    check_exponent(k * lat.x_min(), exponent_cap, lat.x_min());
    check_exponent(k * lat.x_max(), exponent_cap, lat.x_max());
    MetricOperator m;
    m.eta.reserve(lat.size());
    for (double x : lat.points()) m.eta.push_back(std::exp(k * x));
    return m;
}

MetricOperator continuum_metric_generalized(double sigma, const PotentialSpec& V,
                                            const Lattice& lat, double exponent_cap) {
    MarketParams{sigma, 0.0}.validate();
    const std::vector<double> integral = cumulative_trapezoid(V.realize(lat), lat);
    const double scale = 2.0 / (sigma * sigma);
    // At x_min the anchored integral vanishes.
    check_exponent(-lat.x_min(), exponent_cap, lat.x_min());
    MetricOperator m;
    m.eta.resize(lat.size());
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const double exponent = scale * integral[i] - lat[i];
        check_exponent(exponent, exponent_cap, lat[i]);
        m.eta[i] = std::exp(exponent);
    }
    return m;
}

MetricOperator detailed_balance_metric(const TridiagonalOperator& H, double eta_first) {
    if (!(eta_first > 0.0) || !std::isfinite(eta_first)) {
        throw ValidationError("detailed-balance anchor must be positive and finite");
    }
    const std::size_t n = H.size();
    MetricOperator m;
    m.eta.resize(n);
    if (n == 0) return m;
    m.eta[0] = eta_first;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double up = H.upper[i];
        const double lo = H.lower[i];
        if (up == 0.0 || lo == 0.0 || (up > 0.0) != (lo > 0.0)) {
            // Split each entry into diffusion (mean) and drift (half-difference):
            // the pair keeps its sign while |drift| < |diffusion|, and both
            // scale with dx as 1/dx^2 and 1/dx respectively.
            const double diffusion = std::abs(0.5 * (up + lo));
            const double drift = std::abs(0.5 * (up - lo));
            const double bound = drift > 0.0 ? H.dx * diffusion / drift : 0.0;
            throw SymmetrizationError(i, H.dx, bound);
        }
        m.eta[i + 1] = m.eta[i] * up / lo;
        if (!std::isfinite(m.eta[i + 1]) || m.eta[i + 1] == 0.0) {
            throw MetricOverflowError(
                "metric overflow: shrink window or renormalize (detailed-balance recurrence left "
                "double range at node " +
                std::to_string(i + 1) + ")");
        }
    }
    return m;
}

double pseudo_hermiticity_residual(const TridiagonalOperator& H, const MetricOperator& eta) {
    const std::size_t n = H.size();
    if (eta.size() != n) throw ValidationError("metric and operator sizes differ");
    const double scale = H.norm_inf();
    if (scale == 0.0) return 0.0;
    // Off-diagonal entries of eta H eta^{-1} - H^T; the diagonal cancels.
    std::vector<double> row(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double ratio = eta.eta[i] / eta.eta[i + 1];
        row[i] += std::abs(ratio * H.upper[i] - H.lower[i]);
        row[i + 1] += std::abs(H.lower[i] / ratio - H.upper[i]);
    }
    return *std::max_element(row.begin(), row.end()) / scale;
}

}  // namespace etabs
