#pragma once

#include "etabs/tridiagonal.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace etabs {

/// Square real matrix stored by diagonals, with `lower` sub- and `upper`
/// super-diagonals. Products widen the band; nothing is truncated.
class BandMatrix {
public:
    BandMatrix() = default;
    BandMatrix(std::size_t n, std::size_t lower, std::size_t upper);

    static BandMatrix zero(std::size_t n) { return BandMatrix(n, 0, 0); }
    static BandMatrix identity(std::size_t n);
    static BandMatrix from_tridiagonal(const TridiagonalOperator& t);

    std::size_t size() const noexcept { return n_; }
    std::size_t lower_bandwidth() const noexcept { return lower_; }
    std::size_t upper_bandwidth() const noexcept { return upper_; }

    /// Entry (i, j); zero outside the stored band.
    double operator()(std::size_t i, std::size_t j) const noexcept;
    /// Mutable entry; (i, j) must lie inside the band.
    double& at(std::size_t i, std::size_t j);

    BandMatrix transpose() const;
    /// diag(left) * this * diag(right)
    BandMatrix scaled(std::span<const double> left, std::span<const double> right) const;

    std::vector<double> row_abs_sums() const;
    double norm_inf() const;
    double max_abs() const noexcept;

    /// Throws ValidationError if anything lies outside the three central bands.
    TridiagonalOperator to_tridiagonal(double x_min, double dx) const;

    friend BandMatrix operator*(const BandMatrix& a, const BandMatrix& b);
    friend BandMatrix operator+(const BandMatrix& a, const BandMatrix& b);
    friend BandMatrix operator-(const BandMatrix& a, const BandMatrix& b);
    friend BandMatrix operator*(double s, const BandMatrix& a);

private:
    bool in_band(std::size_t i, std::size_t j) const noexcept {
        return j + lower_ >= i && i + upper_ >= j;
    }

    std::size_t n_ = 0;
    std::size_t lower_ = 0;
    std::size_t upper_ = 0;
    // data_[(j - i + lower_) * n_ + i]
    std::vector<double> data_;
};

/// 2 x 2 block operator over two copies of the lattice.
struct BlockOperator {
    BandMatrix b00;
    BandMatrix b01;
    BandMatrix b10;
    BandMatrix b11;

    std::size_t block_size() const noexcept { return b00.size(); }
    double norm_inf() const;
    double max_abs() const;

    /// Block-diagonal metric diag(eta, eta): diag(eta)^{-1} M^T diag(eta).
    BlockOperator pseudo_adjoint(std::span<const double> eta) const;

    friend BlockOperator operator*(const BlockOperator& a, const BlockOperator& b);
    friend BlockOperator operator+(const BlockOperator& a, const BlockOperator& b);
    friend BlockOperator operator-(const BlockOperator& a, const BlockOperator& b);
};

/// ||eta M eta^{-1} - M^T||_inf / ||M||_inf under the metric diag(eta, eta).
double block_pseudo_hermiticity_residual(const BlockOperator& m, std::span<const double> eta);

}  // namespace etabs
