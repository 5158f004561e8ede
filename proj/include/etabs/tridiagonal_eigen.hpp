#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace etabs {

/// Eigenpairs of a real symmetric tridiagonal matrix, ascending.
struct TridiagonalEigen {
    std::vector<double> values;
    /// Mode-major: vectors[k * n + i] is component i of eigenvector k.
    std::vector<double> vectors;

    std::size_t size() const noexcept { return values.size(); }
    std::span<const double> vector(std::size_t k) const {
        const std::size_t n = size();
        return {vectors.data() + k * n, n};
    }
};

/// Eigenvalues only (implicit-shift QL, O(n^2)). `off` holds the n-1
/// off-diagonal entries.
std::vector<double> symmetric_tridiagonal_eigenvalues(std::span<const double> diag,
                                                      std::span<const double> off);

enum class EigenvectorMethod {
    /// QL eigenvalues, then inverse iteration on T - lambda I with
    /// Gram-Schmidt inside clusters of nearly equal eigenvalues. O(n^2).
    inverse_iteration,
    /// Record the QL Givens rotations and apply them to the identity in
    /// independent row tiles. O(n^3).
    ql_accumulation,
};

/**
 * Full eigendecomposition; eigenvectors are unit length with their
 * largest-magnitude component positive (the first one, within a relative
 * 1e-6, when several tie).
 *
 * Work is split over `threads` workers (0 = hardware concurrency) in
 * independent units, so results are bitwise identical for any thread count.
 */
TridiagonalEigen symmetric_tridiagonal_eigen(
    std::span<const double> diag, std::span<const double> off, unsigned threads = 0,
    EigenvectorMethod method = EigenvectorMethod::inverse_iteration);

}  // namespace etabs
