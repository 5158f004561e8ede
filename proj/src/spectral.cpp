#include "etabs/spectral.hpp"

#include "etabs/error.hpp"
#include "etabs/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace etabs {

SpectralDecomposition::SpectralDecomposition(std::vector<double> eigenvalues,
                                             std::vector<double> eigenfunctions,
                                             MetricOperator eta, QuadratureWeights weights)
    : eigenvalues_(std::move(eigenvalues)),
      eigenfunctions_(std::move(eigenfunctions)),
      eta_(std::move(eta)),
      weights_(std::move(weights)) {
    const std::size_t n = eigenvalues_.size();
    if (eigenfunctions_.size() != n * n || eta_.size() != n || weights_.size() != n) {
        throw ValidationError("spectral decomposition parts have inconsistent sizes");
    }
    measure_.resize(n);
    for (std::size_t i = 0; i < n; ++i) measure_[i] = eta_.eta[i] * weights_[i];
}

SymmetrizedOperator symmetrize(const TridiagonalOperator& H, const MetricOperator& eta) {
    const std::size_t n = H.size();
    if (eta.size() != n) throw ValidationError("metric and operator sizes differ");
    if (!eta.is_positive()) throw ValidationError("symmetrization needs a positive metric");
    SymmetrizedOperator out{H, std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) out.scaling[i] = std::sqrt(eta.eta[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double ratio = out.scaling[i] / out.scaling[i + 1];
        const double up = ratio * H.upper[i];
        const double lo = H.lower[i] / ratio;
        const double mean = 0.5 * (up + lo);
        out.S.upper[i] = mean;
        out.S.lower[i] = mean;
    }
    return out;
}

TridiagonalEigen eigendecompose(const TridiagonalOperator& S, unsigned threads,
                                EigenvectorMethod method) {
    if (!S.is_symmetric()) throw ValidationError("eigendecompose requires a symmetric operator");
    return symmetric_tridiagonal_eigen(S.diag, S.upper, threads, method);
}

std::vector<double> eta_normalize(const TridiagonalEigen& vectors, const MetricOperator& eta,
                                  const QuadratureWeights& w) {
    const std::size_t n = vectors.size();
    if (eta.size() != n || w.size() != n) throw ValidationError("normalization size mismatch");
    std::vector<double> inv_root(n);
    for (std::size_t i = 0; i < n; ++i) inv_root[i] = 1.0 / std::sqrt(eta.eta[i] * w[i]);

    std::vector<double> psi(n * n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto v = vectors.vector(k);
        double* out = psi.data() + k * n;
        for (std::size_t i = 0; i < n; ++i) out[i] = v[i] * inv_root[i];
        const double norm = std::sqrt(pseudo_inner_product({out, n}, {out, n}, eta, w));
        for (std::size_t i = 0; i < n; ++i) out[i] /= norm;
    }
    return psi;
}

SpectralDecomposition decompose(const TridiagonalOperator& H, const MetricOperator& eta,
                                const QuadratureWeights& w, unsigned threads) {
    const SymmetrizedOperator sym = symmetrize(H, eta);
    TridiagonalEigen eig = eigendecompose(sym.S, threads);
    std::vector<double> psi = eta_normalize(eig, eta, w);
    return SpectralDecomposition(std::move(eig.values), std::move(psi), eta, w);
}

SpectralDecomposition decompose(const TridiagonalOperator& H, const QuadratureWeights& w,
                                double eta_first, unsigned threads) {
    return decompose(H, detailed_balance_metric(H, eta_first), w, threads);
}

double pseudo_inner_product(std::span<const double> f, std::span<const double> g,
                            const MetricOperator& eta, const QuadratureWeights& w) {
    const std::size_t n = f.size();
    if (g.size() != n || eta.size() != n || w.size() != n) {
        throw ValidationError("inner product operands have different lengths");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * eta.eta[i] * f[i] * g[i];
    return acc;
}

std::vector<std::string> decay_warnings(const SpectralDecomposition& decomp, double tau) {
    std::vector<std::string> out;
    const auto ev = decomp.eigenvalues();
    if (ev.empty()) return out;
    const double decay = tau * ev.back();
    if (decay < kMinKernelDecay) {
        std::ostringstream os;
        os << "weak spectral decay: tau * eps_max = " << decay << " < " << kMinKernelDecay
           << "; truncation-window artifacts may dominate";
        out.push_back(os.str());
    }
    return out;
}

namespace {

// Four independent partial sums; the order is fixed, so results do not
// depend on the thread count.
double dot_product(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

void check_tau(double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("tau must be positive");
}

std::vector<double> decay_factors(const SpectralDecomposition& decomp, double tau) {
    std::vector<double> f(decomp.size());
    const auto ev = decomp.eigenvalues();
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = std::exp(-tau * ev[k]);
    return f;
}

}  // namespace

KernelMatrix pricing_kernel(const SpectralDecomposition& decomp, double tau) {
    check_tau(tau);
    const std::size_t n = decomp.size();
    const std::vector<double> decay = decay_factors(decomp, tau);
    const auto mu = decomp.measure();

    KernelMatrix K;
    K.tau = tau;
    K.n = n;
    K.values.assign(n * n, 0.0);
    K.warnings = decay_warnings(decomp, tau);
    // Rank-one accumulation, mode by mode.
    std::vector<double> right(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto psi = decomp.eigenfunction(k);
        for (std::size_t j = 0; j < n; ++j) right[j] = psi[j] * mu[j];
        for (std::size_t i = 0; i < n; ++i) {
            const double left = decay[k] * psi[i];
            double* row = K.values.data() + i * n;
            for (std::size_t j = 0; j < n; ++j) row[j] += left * right[j];
        }
    }
    return K;
}

std::vector<double> kernel_row(const SpectralDecomposition& decomp, double tau, std::size_t i) {
    check_tau(tau);
    const std::size_t n = decomp.size();
    if (i >= n) throw ValidationError("kernel row index out of range");
    const std::vector<double> decay = decay_factors(decomp, tau);
    const auto mu = decomp.measure();
    std::vector<double> row(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const auto psi = decomp.eigenfunction(k);
        const double left = decay[k] * psi[i];
        for (std::size_t j = 0; j < n; ++j) row[j] += left * psi[j];
    }
    for (std::size_t j = 0; j < n; ++j) row[j] *= mu[j];
    return row;
}

std::vector<double> evolve(const SpectralDecomposition& decomp, double tau,
                           std::span<const double> g) {
    check_tau(tau);
    const std::size_t n = decomp.size();
    if (g.size() != n) throw ValidationError("payoff length does not match the lattice");
    const std::vector<double> decay = decay_factors(decomp, tau);
    const auto mu = decomp.measure();
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const auto psi = decomp.eigenfunction(k);
        double coeff = 0.0;
        for (std::size_t j = 0; j < n; ++j) coeff += psi[j] * mu[j] * g[j];
        coeff *= decay[k];
        for (std::size_t i = 0; i < n; ++i) out[i] += coeff * psi[i];
    }
    return out;
}

double eta_gram_residual(const SpectralDecomposition& decomp, unsigned threads) {
    const std::size_t n = decomp.size();
    // u_k = psi_k * sqrt(eta w) turns the eta-Gram matrix into a plain one.
    std::vector<double> root(n);
    for (std::size_t i = 0; i < n; ++i) root[i] = std::sqrt(decomp.measure()[i]);
    std::vector<double> u(n * n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto psi = decomp.eigenfunction(k);
        for (std::size_t i = 0; i < n; ++i) u[k * n + i] = psi[i] * root[i];
    }
    std::vector<double> worst(n, 0.0);
    parallel_for(n, threads, [&](std::size_t a) {
        const double* ua = u.data() + a * n;
        double w = 0.0;
        for (std::size_t b = a; b < n; ++b) {
            const double* ub = u.data() + b * n;
            const double dot = dot_product(ua, ub, n);
            w = std::max(w, std::abs(dot - (a == b ? 1.0 : 0.0)));
        }
        worst[a] = w;
    });
    return *std::max_element(worst.begin(), worst.end());
}

double completeness_residual(const SpectralDecomposition& decomp, unsigned threads) {
    const std::size_t n = decomp.size();
    // Node-major copy: t[i * n + k] = psi_k[i].
    std::vector<double> t(n * n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto psi = decomp.eigenfunction(k);
        for (std::size_t i = 0; i < n; ++i) t[i * n + k] = psi[i];
    }
    const auto mu = decomp.measure();
    std::vector<double> worst(n, 0.0);
    parallel_for(n, threads, [&](std::size_t i) {
        const double* ti = t.data() + i * n;
        double w = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double* tj = t.data() + j * n;
            const double dot = dot_product(ti, tj, n);
            w = std::max(w, std::abs(dot * mu[j] - (i == j ? 1.0 : 0.0)));
        }
        worst[i] = w;
    });
    return *std::max_element(worst.begin(), worst.end());
}

std::vector<double> eta_norm_residuals(const SpectralDecomposition& decomp) {
    std::vector<double> out(decomp.size());
    for (std::size_t k = 0; k < decomp.size(); ++k) {
        const auto psi = decomp.eigenfunction(k);
        out[k] = std::abs(
            pseudo_inner_product(psi, psi, decomp.metric(), decomp.weights()) - 1.0);
    }
    return out;
}

}  // namespace etabs
