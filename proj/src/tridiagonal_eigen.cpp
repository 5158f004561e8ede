#include "etabs/tridiagonal_eigen.hpp"

#include "etabs/error.hpp"
#include "etabs/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

namespace etabs {

namespace {

constexpr int kMaxSweeps = 60;

struct Rotation {
    double c;
    double s;
    std::uint32_t i;
};

/**
 * Implicit-shift QL on (d, e) in place, where e[i] couples d[i] and d[i+1]
 * and e[n-1] is scratch. Rotations acting on columns (i, i+1) of the
 * accumulated eigenvector matrix are appended to `log` when non-null.
 */
void implicit_ql(std::vector<double>& d, std::vector<double>& e, std::vector<Rotation>* log) {
    const std::size_t n = d.size();
    const double eps = std::numeric_limits<double>::epsilon();
    double shift_total = 0.0;
    double scale = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        scale = std::max(scale, std::abs(d[l]) + std::abs(e[l]));
        std::size_t m = l;
        while (m < n - 1 && std::abs(e[m]) > eps * scale) ++m;

        if (m > l) {
            int sweeps = 0;
            do {
                if (++sweeps > kMaxSweeps) throw ConvergenceError(l, sweeps);

                // Wilkinson-type shift from the leading 2x2 block.
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0.0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
                shift_total += h;

                p = d[m];
                double c = 1.0;
                double c2 = c;
                double c3 = c;
                const double el1 = e[l + 1];
                double s = 0.0;
                double s2 = 0.0;
                for (std::size_t ii = m; ii-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[ii];
                    h = c * p;
                    r = std::hypot(p, e[ii]);
                    e[ii + 1] = s * r;
                    s = e[ii] / r;
                    c = p / r;
                    p = c * d[ii] - s * g;
                    d[ii + 1] = h + s * (c * g + s * d[ii]);
                    if (log) log->push_back({c, s, static_cast<std::uint32_t>(ii)});
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * scale);
        }
        d[l] += shift_total;
        e[l] = 0.0;
    }
}

void load(std::span<const double> diag, std::span<const double> off, std::vector<double>& d,
          std::vector<double>& e) {
    const std::size_t n = diag.size();
    if (n == 0) throw ValidationError("eigensolver needs a nonempty matrix");
    if (off.size() + 1 != n) throw ValidationError("off-diagonal length must be n - 1");
    d.assign(diag.begin(), diag.end());
    e.assign(n, 0.0);
    std::copy(off.begin(), off.end(), e.begin());
}

constexpr std::size_t kLanes = 16;

// Applies the rotation log to rows [k0, k0 + kLanes) of the identity and
// scatters the result into the mode-major output.
void accumulate_tile(const std::vector<Rotation>& log, std::size_t n, std::size_t k0,
                     std::vector<double>& tile, std::vector<double>& out) {
    const std::size_t lanes = std::min(kLanes, n - k0);
    std::fill(tile.begin(), tile.end(), 0.0);
    for (std::size_t r = 0; r < lanes; ++r) tile[(k0 + r) * kLanes + r] = 1.0;

    for (const Rotation& rot : log) {
        double* lo = tile.data() + static_cast<std::size_t>(rot.i) * kLanes;
        double* hi = lo + kLanes;
        const double c = rot.c;
        const double s = rot.s;
        for (std::size_t r = 0; r < kLanes; ++r) {
            const double h = hi[r];
            hi[r] = s * lo[r] + c * h;
            lo[r] = c * lo[r] - s * h;
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t r = 0; r < lanes; ++r) out[j * n + k0 + r] = tile[j * kLanes + r];
    }
}

}  // namespace

std::vector<double> symmetric_tridiagonal_eigenvalues(std::span<const double> diag,
                                                      std::span<const double> off) {
    std::vector<double> d;
    std::vector<double> e;
    load(diag, off, d, e);
    implicit_ql(d, e, nullptr);
    std::sort(d.begin(), d.end());
    return d;
}

namespace {

// Flip so the largest-magnitude component is positive. Near-ties (symmetric
// and antisymmetric modes) go to the first such component, so the sign does
// not depend on round-off.
void fix_sign(std::span<double> v) {
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, std::abs(x));
    std::size_t best = 0;
    while (best + 1 < v.size() && std::abs(v[best]) < (1.0 - 1e-6) * peak) ++best;
    if (v[best] < 0.0) {
        for (double& x : v) x = -x;
    }
}

TridiagonalEigen eigen_by_accumulation(std::vector<double> d, std::vector<double> e,
                                       unsigned threads) {
    const std::size_t n = d.size();
    std::vector<Rotation> log;
    log.reserve(n * n);
    implicit_ql(d, e, &log);

    std::vector<double> unsorted(n * n);
    const std::size_t tiles = (n + kLanes - 1) / kLanes;
    parallel_for(tiles, threads, [&](std::size_t t) {
        thread_local std::vector<double> tile;
        tile.assign(n * kLanes, 0.0);
        accumulate_tile(log, n, t * kLanes, tile, unsorted);
    });

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });

    TridiagonalEigen out;
    out.values.resize(n);
    out.vectors.resize(n * n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = d[order[k]];
        std::copy_n(unsorted.begin() + order[k] * n, n, out.vectors.begin() + k * n);
        fix_sign({out.vectors.data() + k * n, n});
    }
    return out;
}

/// LU factorization of T - lambda I with partial pivoting (row swaps
/// between neighbours only), kept for repeated solves.
class ShiftedTridiagonalLU {
public:
    ShiftedTridiagonalLU(std::span<const double> diag, std::span<const double> off, double lambda,
                         double tiny)
        : d_(diag.size()), du_(off.begin(), off.end()), dl_(off.begin(), off.end()),
          du2_(diag.size() > 1 ? diag.size() - 1 : 0, 0.0), swapped_(off.size(), false) {
        const std::size_t n = diag.size();
        for (std::size_t i = 0; i < n; ++i) d_[i] = diag[i] - lambda;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (std::abs(d_[i]) >= std::abs(dl_[i])) {
                if (d_[i] == 0.0) d_[i] = tiny;
                const double fact = dl_[i] / d_[i];
                dl_[i] = fact;
                d_[i + 1] -= fact * du_[i];
            } else {
                const double fact = d_[i] / dl_[i];
                d_[i] = dl_[i];
                dl_[i] = fact;
                const double temp = du_[i];
                du_[i] = d_[i + 1];
                d_[i + 1] = temp - fact * d_[i + 1];
                if (i + 2 < n) {
                    du2_[i] = du_[i + 1];
                    du_[i + 1] = -fact * du_[i + 1];
                }
                swapped_[i] = true;
            }
        }
        for (double& v : d_) {
            if (std::abs(v) < tiny) v = v < 0.0 ? -tiny : tiny;
        }
    }

    void solve(std::span<double> b) const {
        const std::size_t n = d_.size();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (swapped_[i]) std::swap(b[i], b[i + 1]);
            b[i + 1] -= dl_[i] * b[i];
        }
        b[n - 1] /= d_[n - 1];
        if (n > 1) b[n - 2] = (b[n - 2] - du_[n - 2] * b[n - 1]) / d_[n - 2];
        for (std::size_t i = n >= 3 ? n - 2 : 0; i-- > 0;) {
            b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
        }
    }

private:
    std::vector<double> d_;
    std::vector<double> du_;
    std::vector<double> dl_;
    std::vector<double> du2_;
    std::vector<bool> swapped_;
};

constexpr int kInverseIterations = 3;
// Eigenvalues closer than this fraction of ||T|| share a cluster and are
// explicitly orthogonalized against each other.
constexpr double kClusterGap = 1e-4;

void normalize(std::span<double> v) {
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) return;
    double norm2 = 0.0;
    for (double& x : v) {
        x /= scale;
        norm2 += x * x;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) x *= inv;
}

void orthogonalize(std::span<double> v, const std::vector<double>& vectors, std::size_t n,
                   std::size_t first, std::size_t last) {
    for (std::size_t k = first; k < last; ++k) {
        const double* q = vectors.data() + k * n;
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += q[i] * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= dot * q[i];
    }
}

TridiagonalEigen eigen_by_inverse_iteration(std::span<const double> diag,
                                            std::span<const double> off, std::vector<double> d,
                                            std::vector<double> e, unsigned threads) {
    const std::size_t n = d.size();
    implicit_ql(d, e, nullptr);
    std::sort(d.begin(), d.end());

    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = std::abs(diag[i]);
        if (i > 0) row += std::abs(off[i - 1]);
        if (i + 1 < n) row += std::abs(off[i]);
        norm = std::max(norm, row);
    }
    if (norm == 0.0) norm = 1.0;
    const double eps = std::numeric_limits<double>::epsilon();
    const double tiny = eps * norm;

    // Cluster boundaries: cluster c covers [starts[c], starts[c+1]).
    std::vector<std::size_t> starts{0};
    for (std::size_t k = 1; k < n; ++k) {
        if (d[k] - d[k - 1] > kClusterGap * norm) starts.push_back(k);
    }
    starts.push_back(n);

    TridiagonalEigen out;
    out.values = d;
    out.vectors.assign(n * n, 0.0);

    parallel_for(starts.size() - 1, threads, [&](std::size_t c) {
        double shift = -std::numeric_limits<double>::infinity();
        for (std::size_t k = starts[c]; k < starts[c + 1]; ++k) {
            // Coincident eigenvalues get nudged apart so each solve sees a
            // distinct shift.
            const double lambda = std::max(d[k], shift + 10.0 * eps * std::abs(d[k]));
            shift = lambda;
            const ShiftedTridiagonalLU lu(diag, off, lambda, tiny);

            std::span<double> v{out.vectors.data() + k * n, n};
            std::uint64_t state = 0x9E3779B97F4A7C15ULL ^ (k * 0xBF58476D1CE4E5B9ULL);
            for (double& x : v) {
                state = state * 6364136223846793005ULL + 1442695040888963407ULL;
                x = static_cast<double>(state >> 11) * 0x1.0p-53 - 0.5;
            }
            for (int it = 0; it < kInverseIterations; ++it) {
                normalize(v);
                lu.solve(v);
                orthogonalize(v, out.vectors, n, starts[c], k);
            }
            normalize(v);
            orthogonalize(v, out.vectors, n, starts[c], k);
            normalize(v);
            fix_sign(v);
        }
    });
    return out;
}

}  // namespace

TridiagonalEigen symmetric_tridiagonal_eigen(std::span<const double> diag,
                                             std::span<const double> off, unsigned threads,
                                             EigenvectorMethod method) {
    std::vector<double> d;
    std::vector<double> e;
    load(diag, off, d, e);
    if (method == EigenvectorMethod::ql_accumulation) {
        return eigen_by_accumulation(std::move(d), std::move(e), threads);
    }
    return eigen_by_inverse_iteration(diag, off, std::move(d), std::move(e), threads);
}

}  // namespace etabs
