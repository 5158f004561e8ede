#include "etabs/band_matrix.hpp"

#include "etabs/error.hpp"

#include <algorithm>
#include <cmath>

namespace etabs {

BandMatrix::BandMatrix(std::size_t n, std::size_t lower, std::size_t upper)
    : n_(n),
      lower_(std::min(lower, n > 0 ? n - 1 : 0)),
      upper_(std::min(upper, n > 0 ? n - 1 : 0)),
      data_((lower_ + upper_ + 1) * n, 0.0) {}

BandMatrix BandMatrix::identity(std::size_t n) {
    BandMatrix m(n, 0, 0);
    std::fill(m.data_.begin(), m.data_.end(), 1.0);
    return m;
}

BandMatrix BandMatrix::from_tridiagonal(const TridiagonalOperator& t) {
    const std::size_t n = t.size();
    BandMatrix m(n, 1, 1);
    for (std::size_t i = 0; i < n; ++i) {
        m.at(i, i) = t.diag[i];
        if (i + 1 < n) {
            m.at(i, i + 1) = t.upper[i];
            m.at(i + 1, i) = t.lower[i];
        }
    }
    return m;
}

double BandMatrix::operator()(std::size_t i, std::size_t j) const noexcept {
    if (!in_band(i, j)) return 0.0;
    return data_[(j + lower_ - i) * n_ + i];
}

double& BandMatrix::at(std::size_t i, std::size_t j) {
    if (i >= n_ || j >= n_ || !in_band(i, j)) {
        throw ValidationError("band matrix entry outside the stored band");
    }
    return data_[(j + lower_ - i) * n_ + i];
}

BandMatrix BandMatrix::transpose() const {
    BandMatrix t(n_, upper_, lower_);
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j_lo = i > lower_ ? i - lower_ : 0;
        const std::size_t j_hi = std::min(n_ - 1, i + upper_);
        for (std::size_t j = j_lo; j <= j_hi; ++j) t.at(j, i) = (*this)(i, j);
    }
    return t;
}

BandMatrix BandMatrix::scaled(std::span<const double> left, std::span<const double> right) const {
    if (left.size() != n_ || right.size() != n_) throw ValidationError("scaling size mismatch");
    BandMatrix s = *this;
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j_lo = i > lower_ ? i - lower_ : 0;
        const std::size_t j_hi = std::min(n_ - 1, i + upper_);
        for (std::size_t j = j_lo; j <= j_hi; ++j) s.at(i, j) *= left[i] * right[j];
    }
    return s;
}

std::vector<double> BandMatrix::row_abs_sums() const {
    std::vector<double> rows(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j_lo = i > lower_ ? i - lower_ : 0;
        const std::size_t j_hi = std::min(n_ - 1, i + upper_);
        for (std::size_t j = j_lo; j <= j_hi; ++j) rows[i] += std::abs((*this)(i, j));
    }
    return rows;
}

double BandMatrix::norm_inf() const {
    const std::vector<double> rows = row_abs_sums();
    return rows.empty() ? 0.0 : *std::max_element(rows.begin(), rows.end());
}

double BandMatrix::max_abs() const noexcept {
    double best = 0.0;
    for (double v : data_) best = std::max(best, std::abs(v));
    return best;
}

TridiagonalOperator BandMatrix::to_tridiagonal(double x_min, double dx) const {
    TridiagonalOperator t(n_, x_min, dx);
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j_lo = i > lower_ ? i - lower_ : 0;
        const std::size_t j_hi = std::min(n_ - 1, i + upper_);
        for (std::size_t j = j_lo; j <= j_hi; ++j) {
            const double v = (*this)(i, j);
            if (j == i) {
                t.diag[i] = v;
            } else if (j == i + 1) {
                t.upper[i] = v;
            } else if (i == j + 1) {
                t.lower[j] = v;
            } else if (v != 0.0) {
                throw ValidationError("band matrix is not tridiagonal");
            }
        }
    }
    return t;
}

BandMatrix operator*(const BandMatrix& a, const BandMatrix& b) {
    if (a.n_ != b.n_) throw ValidationError("band matrix size mismatch");
    const std::size_t n = a.n_;
    BandMatrix c(n, a.lower_ + b.lower_, a.upper_ + b.upper_);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k_lo = i > a.lower_ ? i - a.lower_ : 0;
        const std::size_t k_hi = std::min(n - 1, i + a.upper_);
        for (std::size_t k = k_lo; k <= k_hi; ++k) {
            const double aik = a(i, k);
            const std::size_t j_lo = k > b.lower_ ? k - b.lower_ : 0;
            const std::size_t j_hi = std::min(n - 1, k + b.upper_);
            for (std::size_t j = j_lo; j <= j_hi; ++j) c.at(i, j) += aik * b(k, j);
        }
    }
    return c;
}

namespace {

BandMatrix combine(const BandMatrix& a, const BandMatrix& b, double sign) {
    if (a.size() != b.size()) throw ValidationError("band matrix size mismatch");
    const std::size_t n = a.size();
    BandMatrix c(n, std::max(a.lower_bandwidth(), b.lower_bandwidth()),
                 std::max(a.upper_bandwidth(), b.upper_bandwidth()));
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j_lo = i > c.lower_bandwidth() ? i - c.lower_bandwidth() : 0;
        const std::size_t j_hi = std::min(n - 1, i + c.upper_bandwidth());
        for (std::size_t j = j_lo; j <= j_hi; ++j) c.at(i, j) = a(i, j) + sign * b(i, j);
    }
    return c;
}

}  // namespace

BandMatrix operator+(const BandMatrix& a, const BandMatrix& b) { return combine(a, b, 1.0); }

BandMatrix operator-(const BandMatrix& a, const BandMatrix& b) { return combine(a, b, -1.0); }

BandMatrix operator*(double s, const BandMatrix& a) {
    BandMatrix c = a;
    for (double& v : c.data_) v *= s;
    return c;
}

double BlockOperator::norm_inf() const {
    const std::vector<double> r00 = b00.row_abs_sums();
    const std::vector<double> r01 = b01.row_abs_sums();
    const std::vector<double> r10 = b10.row_abs_sums();
    const std::vector<double> r11 = b11.row_abs_sums();
    double best = 0.0;
    for (std::size_t i = 0; i < block_size(); ++i) {
        best = std::max({best, r00[i] + r01[i], r10[i] + r11[i]});
    }
    return best;
}

double BlockOperator::max_abs() const {
    return std::max({b00.max_abs(), b01.max_abs(), b10.max_abs(), b11.max_abs()});
}

BlockOperator BlockOperator::pseudo_adjoint(std::span<const double> eta) const {
    std::vector<double> inv(eta.size());
    std::transform(eta.begin(), eta.end(), inv.begin(), [](double v) { return 1.0 / v; });
    // (M#)_{ab} = eta^{-1} (M_{ba})^T eta
    return BlockOperator{b00.transpose().scaled(inv, eta), b10.transpose().scaled(inv, eta),
                         b01.transpose().scaled(inv, eta), b11.transpose().scaled(inv, eta)};
}

BlockOperator operator*(const BlockOperator& a, const BlockOperator& b) {
    return BlockOperator{a.b00 * b.b00 + a.b01 * b.b10, a.b00 * b.b01 + a.b01 * b.b11,
                         a.b10 * b.b00 + a.b11 * b.b10, a.b10 * b.b01 + a.b11 * b.b11};
}

BlockOperator operator+(const BlockOperator& a, const BlockOperator& b) {
    return BlockOperator{a.b00 + b.b00, a.b01 + b.b01, a.b10 + b.b10, a.b11 + b.b11};
}

BlockOperator operator-(const BlockOperator& a, const BlockOperator& b) {
    return BlockOperator{a.b00 - b.b00, a.b01 - b.b01, a.b10 - b.b10, a.b11 - b.b11};
}

double block_pseudo_hermiticity_residual(const BlockOperator& m, std::span<const double> eta) {
    std::vector<double> inv(eta.size());
    std::transform(eta.begin(), eta.end(), inv.begin(), [](double v) { return 1.0 / v; });
    const BlockOperator conj{m.b00.scaled(eta, inv), m.b01.scaled(eta, inv),
                             m.b10.scaled(eta, inv), m.b11.scaled(eta, inv)};
    const BlockOperator transposed{m.b00.transpose(), m.b10.transpose(), m.b01.transpose(),
                                   m.b11.transpose()};
    const double scale = m.norm_inf();
    return scale == 0.0 ? 0.0 : (conj - transposed).norm_inf() / scale;
}

}  // namespace etabs
