#pragma once

#include "etabs/band_matrix.hpp"
#include "etabs/hamiltonian.hpp"
#include "etabs/lattice.hpp"
#include "etabs/metric.hpp"
#include "etabs/tridiagonal.hpp"

#include <functional>
#include <vector>

namespace etabs {

/// W and W' at the lattice nodes.
struct Superpotential {
    enum class Derivative { analytic, finite_difference };

    std::vector<double> W;
    std::vector<double> W_prime;
    Derivative derivative = Derivative::analytic;

    std::size_t size() const noexcept { return W.size(); }

    static Superpotential analytic(const Lattice& lat, const std::function<double(double)>& w,
                                   const std::function<double(double)>& w_prime);
    /// W' from second-order differences (one-sided at the ends).
    static Superpotential from_values(const Lattice& lat, std::vector<double> w);
};

struct PartnerPotentials {
    std::vector<double> V;
    std::vector<double> V_partner;
};

/// (sigma^2/2 - r)^2 / (2 sigma^2) + r
double delta(const MarketParams& params);

/// V = (sigma^2/2)(W^2 - W'), V_P = (sigma^2/2)(W^2 + W').
PartnerPotentials potentials_from_W(double sigma, const Superpotential& W);

/// (sigma/sqrt 2)[d/dx + W - (1/2 - r/sigma^2)] with a forward difference:
/// upper bidiagonal, Dirichlet beyond the last node.
TridiagonalOperator build_A(const MarketParams& params, const Superpotential& W,
                            const Lattice& lat);

/// eta^{-1} A^T eta: (A#)_{ij} = A_{ji} eta_j / eta_i.
TridiagonalOperator pseudo_adjoint(const TridiagonalOperator& A, const MetricOperator& eta);

struct SusySystem {
    TridiagonalOperator A;
    TridiagonalOperator A_sharp;
    double delta = 0.0;
    /// A# A + delta
    TridiagonalOperator H_eff;
    /// A A# + delta
    TridiagonalOperator H_partner;
    MetricOperator eta;
    /// [[0, A], [0, 0]]
    BlockOperator Q;
    /// diag(eta, eta)^{-1} Q^T diag(eta, eta) = [[0, 0], [A#, 0]]
    BlockOperator Q_sharp;
    /// diag(H_partner - delta, H_eff - delta)
    BlockOperator H_super;
};

SusySystem factorized_system(const MarketParams& params, const Superpotential& W,
                             const Lattice& lat, const MetricOperator& eta);

struct SusyReport {
    // Residuals scaled by the operator norms involved, so round-off is O(eps).
    double anticommutator = 0.0;      ///< ||{Q,Q#} - H|| / ||H||
    double commutator_Q = 0.0;        ///< ||[Q,H]|| / (||Q|| ||H||)
    double commutator_Q_sharp = 0.0;  ///< ||[Q#,H]|| / (||Q#|| ||H||)
    double nilpotency_Q = 0.0;        ///< max |Q^2|
    double nilpotency_Q_sharp = 0.0;  ///< max |(Q#)^2|
    double pseudo_hermiticity_super = 0.0;
    double pseudo_hermiticity_eff = 0.0;
    double pseudo_hermiticity_partner = 0.0;
    double intertwining = 0.0;        ///< A H_eff = H_partner A and A# H_partner = H_eff A#
    double factorization = 0.0;       ///< max_abs(H_eff - delta - A# A) relative

    std::vector<double> spectrum_eff;      ///< eigenvalues of A# A
    std::vector<double> spectrum_partner;  ///< eigenvalues of A A#
    std::vector<double> near_zero_eff;
    std::vector<double> near_zero_partner;
    double pairing = 0.0;  ///< max |e_eff - e_partner| / max(1, |e|) over nonzero pairs
    double min_eigenvalue_eff = 0.0;  ///< lowest eigenvalue of H_eff, compared with delta

    bool eta_constant = false;
    bool a_sharp_is_transpose = false;
    bool classical_susy = false;
};

/// Pure measurement of the pseudo-supersymmetry algebra and spectra.
SusyReport verify_susy(const SusySystem& system);

}  // namespace etabs
