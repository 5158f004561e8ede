#include "etabs/tridiagonal.hpp"

#include "etabs/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace etabs {

TridiagonalOperator::TridiagonalOperator(std::size_t n, double x_min_, double dx_)
    : diag(n, 0.0),
      upper(n > 0 ? n - 1 : 0, 0.0),
      lower(n > 0 ? n - 1 : 0, 0.0),
      x_min(x_min_),
      dx(dx_) {}

double TridiagonalOperator::at(std::size_t i, std::size_t j) const noexcept {
    if (i == j) return diag[i];
    if (j == i + 1) return upper[i];
    if (i == j + 1) return lower[j];
    return 0.0;
}

std::vector<double> TridiagonalOperator::apply(std::span<const double> u) const {
    const std::size_t n = size();
    if (u.size() != n) {
        throw ValidationError("operator of size " + std::to_string(n) +
                              " applied to vector of size " + std::to_string(u.size()));
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = diag[i] * u[i];
        if (i + 1 < n) acc += upper[i] * u[i + 1];
        if (i > 0) acc += lower[i - 1] * u[i - 1];
        out[i] = acc;
    }
    return out;
}

TridiagonalOperator TridiagonalOperator::transpose() const {
    TridiagonalOperator t = *this;
    std::swap(t.upper, t.lower);
    return t;
}

double TridiagonalOperator::norm_inf() const noexcept {
    const std::size_t n = size();
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = std::abs(diag[i]);
        if (i + 1 < n) row += std::abs(upper[i]);
        if (i > 0) row += std::abs(lower[i - 1]);
        best = std::max(best, row);
    }
    return best;
}

void TridiagonalOperator::validate() const {
    const std::size_t n = size();
    const std::size_t off = n > 0 ? n - 1 : 0;
    if (upper.size() != off || lower.size() != off) {
        throw ValidationError("tridiagonal bands have inconsistent lengths");
    }
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(diag.begin(), diag.end(), finite) ||
        !std::all_of(upper.begin(), upper.end(), finite) ||
        !std::all_of(lower.begin(), lower.end(), finite)) {
        throw ValidationError("tridiagonal operator has non-finite entries");
    }
}

std::vector<double> TridiagonalOperator::dense() const {
    const std::size_t n = size();
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        m[i * n + i] = diag[i];
        if (i + 1 < n) {
            m[i * n + i + 1] = upper[i];
            m[(i + 1) * n + i] = lower[i];
        }
    }
    return m;
}

double difference_norm_inf(const TridiagonalOperator& a, const TridiagonalOperator& b) {
    if (a.size() != b.size()) throw ValidationError("operator size mismatch");
    const std::size_t n = a.size();
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = std::abs(a.diag[i] - b.diag[i]);
        if (i + 1 < n) row += std::abs(a.upper[i] - b.upper[i]);
        if (i > 0) row += std::abs(a.lower[i - 1] - b.lower[i - 1]);
        best = std::max(best, row);
    }
    return best;
}

}  // namespace etabs
