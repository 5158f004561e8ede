#include "etabs/susy.hpp"

#include "etabs/error.hpp"
#include "etabs/spectral.hpp"
#include "etabs/tridiagonal_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace etabs {

namespace {

constexpr double kNearZero = 1e-6;

double relative(double value, double scale) { return scale == 0.0 ? value : value / scale; }

std::vector<double> eigenvalues_of(const TridiagonalOperator& H, const MetricOperator& eta) {
    const TridiagonalOperator S = symmetrize(H, eta).S;
    return symmetric_tridiagonal_eigenvalues(S.diag, S.upper);
}

}  // namespace

Superpotential Superpotential::analytic(const Lattice& lat,
                                        const std::function<double(double)>& w,
                                        const std::function<double(double)>& w_prime) {
    Superpotential s;
    s.derivative = Derivative::analytic;
    for (double x : lat.points()) {
        s.W.push_back(w(x));
        s.W_prime.push_back(w_prime(x));
    }
    return s;
}

Superpotential Superpotential::from_values(const Lattice& lat, std::vector<double> w) {
    const std::size_t n = lat.size();
    if (w.size() != n) throw ValidationError("superpotential length does not match the lattice");
    const double dx = lat.dx();
    Superpotential s;
    s.derivative = Derivative::finite_difference;
    s.W_prime.resize(n);
    for (std::size_t i = 1; i + 1 < n; ++i) s.W_prime[i] = (w[i + 1] - w[i - 1]) / (2.0 * dx);
    s.W_prime[0] = (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * dx);
    s.W_prime[n - 1] = (3.0 * w[n - 1] - 4.0 * w[n - 2] + w[n - 3]) / (2.0 * dx);
    s.W = std::move(w);
    return s;
}

double delta(const MarketParams& params) {
    params.validate();
    const double s2 = params.sigma * params.sigma;
    const double drift = params.drift();
    return drift * drift / (2.0 * s2) + params.r;
}

PartnerPotentials potentials_from_W(double sigma, const Superpotential& W) {
    if (W.W_prime.size() != W.W.size()) throw ValidationError("W and W' lengths differ");
    const double half = 0.5 * sigma * sigma;
    PartnerPotentials p;
    p.V.resize(W.size());
    p.V_partner.resize(W.size());
    for (std::size_t i = 0; i < W.size(); ++i) {
        const double sq = W.W[i] * W.W[i];
        p.V[i] = half * (sq - W.W_prime[i]);
        p.V_partner[i] = half * (sq + W.W_prime[i]);
    }
    return p;
}

TridiagonalOperator build_A(const MarketParams& params, const Superpotential& W,
                            const Lattice& lat) {
    params.validate();
    if (W.size() != lat.size()) throw ValidationError("superpotential length does not match");
    const double scale = params.sigma / std::numbers::sqrt2;
    const double kappa = -params.rho_exponent();
    const double dx = lat.dx();
    TridiagonalOperator A(lat.size(), lat.x_min(), dx);
    for (std::size_t i = 0; i < lat.size(); ++i) {
        A.diag[i] = scale * (W.W[i] - kappa - 1.0 / dx);
        if (i + 1 < lat.size()) A.upper[i] = scale / dx;
    }
    return A;
}

TridiagonalOperator pseudo_adjoint(const TridiagonalOperator& A, const MetricOperator& eta) {
    if (eta.size() != A.size()) throw ValidationError("metric and operator sizes differ");
    TridiagonalOperator out = A;
    for (std::size_t i = 0; i + 1 < A.size(); ++i) {
        const double ratio = eta.eta[i + 1] / eta.eta[i];
        out.upper[i] = A.lower[i] * ratio;
        out.lower[i] = A.upper[i] / ratio;
    }
    return out;
}

SusySystem factorized_system(const MarketParams& params, const Superpotential& W,
                             const Lattice& lat, const MetricOperator& eta) {
    if (eta.size() != lat.size()) throw ValidationError("metric does not match the lattice");
    SusySystem sys;
    sys.A = build_A(params, W, lat);
    sys.A_sharp = pseudo_adjoint(sys.A, eta);
    sys.delta = delta(params);
    sys.eta = eta;

    const std::size_t n = lat.size();
    const BandMatrix A = BandMatrix::from_tridiagonal(sys.A);
    const BandMatrix A_sharp = BandMatrix::from_tridiagonal(sys.A_sharp);
    const BandMatrix shift = sys.delta * BandMatrix::identity(n);
    const BandMatrix gram = A_sharp * A;
    const BandMatrix partner = A * A_sharp;

    sys.H_eff = (gram + shift).to_tridiagonal(lat.x_min(), lat.dx());
    sys.H_partner = (partner + shift).to_tridiagonal(lat.x_min(), lat.dx());

    const BandMatrix zero = BandMatrix::zero(n);
    sys.Q = BlockOperator{zero, A, zero, zero};
    sys.Q_sharp = sys.Q.pseudo_adjoint(eta.eta);
    sys.H_super = BlockOperator{BandMatrix::from_tridiagonal(sys.H_partner) - shift, zero, zero,
                                BandMatrix::from_tridiagonal(sys.H_eff) - shift};
    return sys;
}

SusyReport verify_susy(const SusySystem& sys) {
    SusyReport rep;
    const BlockOperator& Q = sys.Q;
    const BlockOperator& Qs = sys.Q_sharp;
    const BlockOperator& H = sys.H_super;
    const double h_norm = H.norm_inf();

    rep.anticommutator = relative((Q * Qs + Qs * Q - H).norm_inf(), h_norm);
    rep.commutator_Q = relative((Q * H - H * Q).norm_inf(), Q.norm_inf() * h_norm);
    rep.commutator_Q_sharp = relative((Qs * H - H * Qs).norm_inf(), Qs.norm_inf() * h_norm);
    rep.nilpotency_Q = (Q * Q).max_abs();
    rep.nilpotency_Q_sharp = (Qs * Qs).max_abs();
    rep.pseudo_hermiticity_super = block_pseudo_hermiticity_residual(H, sys.eta.eta);
    rep.pseudo_hermiticity_eff = pseudo_hermiticity_residual(sys.H_eff, sys.eta);
    rep.pseudo_hermiticity_partner = pseudo_hermiticity_residual(sys.H_partner, sys.eta);

    const BandMatrix A = BandMatrix::from_tridiagonal(sys.A);
    const BandMatrix As = BandMatrix::from_tridiagonal(sys.A_sharp);
    const BandMatrix Heff = BandMatrix::from_tridiagonal(sys.H_eff);
    const BandMatrix Hp = BandMatrix::from_tridiagonal(sys.H_partner);
    rep.intertwining = std::max(
        relative((A * Heff - Hp * A).norm_inf(), A.norm_inf() * Heff.norm_inf()),
        relative((As * Hp - Heff * As).norm_inf(), As.norm_inf() * Hp.norm_inf()));
    const BandMatrix shift = sys.delta * BandMatrix::identity(A.size());
    rep.factorization = relative((Heff - shift - As * A).max_abs(), Heff.max_abs());

    // Spectra of A#A and AA# (both eta-pseudo-Hermitian under the same eta).
    const TridiagonalOperator gram = (As * A).to_tridiagonal(sys.A.x_min, sys.A.dx);
    const TridiagonalOperator partner = (A * As).to_tridiagonal(sys.A.x_min, sys.A.dx);
    rep.spectrum_eff = eigenvalues_of(gram, sys.eta);
    rep.spectrum_partner = eigenvalues_of(partner, sys.eta);
    rep.min_eigenvalue_eff = rep.spectrum_eff.front() + sys.delta;

    const double cutoff = kNearZero * std::max(gram.norm_inf(), partner.norm_inf());
    std::vector<double> eff;
    std::vector<double> par;
    for (double e : rep.spectrum_eff) (std::abs(e) < cutoff ? rep.near_zero_eff : eff).push_back(e);
    for (double e : rep.spectrum_partner) {
        (std::abs(e) < cutoff ? rep.near_zero_partner : par).push_back(e);
    }
    // An unpaired mode, if any, sits at the bottom; align the lists from the top.
    const std::size_t common = std::min(eff.size(), par.size());
    for (std::size_t k = 0; k < common; ++k) {
        const double a = eff[eff.size() - 1 - k];
        const double b = par[par.size() - 1 - k];
        rep.pairing = std::max(rep.pairing, std::abs(a - b) / std::max(1.0, std::abs(a)));
    }

    const auto& eta = sys.eta.eta;
    rep.eta_constant =
        std::all_of(eta.begin(), eta.end(), [&](double v) { return v == eta.front(); });
    rep.a_sharp_is_transpose = sys.A_sharp == sys.A.transpose();
    rep.classical_susy = rep.eta_constant && rep.a_sharp_is_transpose;
    return rep;
}

}  // namespace etabs
