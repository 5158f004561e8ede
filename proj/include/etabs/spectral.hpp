#pragma once

#include "etabs/lattice.hpp"
#include "etabs/metric.hpp"
#include "etabs/tridiagonal.hpp"
#include "etabs/tridiagonal_eigen.hpp"

#include <span>
#include <string>
#include <vector>

namespace etabs {

/// Decay threshold for tau * eps_max below which kernels carry a warning.
inline constexpr double kMinKernelDecay = 30.0;

struct SymmetrizedOperator {
    TridiagonalOperator S;
    /// sqrt(eta); S = diag(scaling) H diag(scaling)^{-1}.
    std::vector<double> scaling;
};

/**
 * Eigenpairs of an eta-pseudo-Hermitian operator with eigenfunctions
 * normalized in the discrete eta inner product.
 */
class SpectralDecomposition {
public:
    SpectralDecomposition(std::vector<double> eigenvalues, std::vector<double> eigenfunctions,
                          MetricOperator eta, QuadratureWeights weights);

    std::size_t size() const noexcept { return eigenvalues_.size(); }
    std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
    std::span<const double> eigenfunction(std::size_t k) const {
        return {eigenfunctions_.data() + k * size(), size()};
    }
    const MetricOperator& metric() const noexcept { return eta_; }
    const QuadratureWeights& weights() const noexcept { return weights_; }

    /// eta[i] * w[i]
    std::span<const double> measure() const noexcept { return measure_; }

private:
    std::vector<double> eigenvalues_;
    std::vector<double> eigenfunctions_;
    MetricOperator eta_;
    QuadratureWeights weights_;
    std::vector<double> measure_;
};

/// Discrete matrix of exp(-tau H) composed with the quadrature.
struct KernelMatrix {
    double tau = 0.0;
    std::size_t n = 0;
    /// Row-major; values[i * n + j] = p(x_i, tau, x_j) w_j.
    std::vector<double> values;
    std::vector<std::string> warnings;

    double operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

/// sqrt(eta) H sqrt(eta)^{-1}, with the two off-diagonals averaged so the
/// result is exactly symmetric.
SymmetrizedOperator symmetrize(const TridiagonalOperator& H, const MetricOperator& eta);

/// Ascending eigenvalues and orthonormal eigenvectors of a symmetric operator.
TridiagonalEigen eigendecompose(const TridiagonalOperator& S, unsigned threads = 0,
                                EigenvectorMethod method = EigenvectorMethod::inverse_iteration);

/// psi_k = v_k / sqrt(eta w), rescaled to unit eta-norm. Mode-major output.
std::vector<double> eta_normalize(const TridiagonalEigen& vectors, const MetricOperator& eta,
                                  const QuadratureWeights& w);

/// Symmetrize with eta, diagonalize, and eta-normalize.
SpectralDecomposition decompose(const TridiagonalOperator& H, const MetricOperator& eta,
                                const QuadratureWeights& w, unsigned threads = 0);

/// Detailed-balance metric anchored at eta_first, then decompose.
SpectralDecomposition decompose(const TridiagonalOperator& H, const QuadratureWeights& w,
                                double eta_first = 1.0, unsigned threads = 0);

/// sum_i w[i] eta[i] f[i] g[i]
double pseudo_inner_product(std::span<const double> f, std::span<const double> g,
                            const MetricOperator& eta, const QuadratureWeights& w);

/// Full n x n kernel; O(n^3), meant for moderate n.
KernelMatrix pricing_kernel(const SpectralDecomposition& decomp, double tau);

/// Row i of the kernel, O(n^2).
std::vector<double> kernel_row(const SpectralDecomposition& decomp, double tau, std::size_t i);

/// exp(-tau H) g by spectral projection, O(n^2).
std::vector<double> evolve(const SpectralDecomposition& decomp, double tau,
                           std::span<const double> g);

/// Warnings about insufficient spectral decay at this horizon, if any.
std::vector<std::string> decay_warnings(const SpectralDecomposition& decomp, double tau);

/// max |G - I| for the eta-Gram matrix G of the eigenfunctions.
double eta_gram_residual(const SpectralDecomposition& decomp, unsigned threads = 0);

/// max |sum_k psi_k[i] psi_k[j] eta[j] w[j] - delta_ij|.
double completeness_residual(const SpectralDecomposition& decomp, unsigned threads = 0);

/// |<psi_k, psi_k>_eta - 1| per mode.
std::vector<double> eta_norm_residuals(const SpectralDecomposition& decomp);

}  // namespace etabs
