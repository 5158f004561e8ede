// Acceptance suite: one PASS/FAIL line per criterion; exits nonzero if any
// criterion fails.

#include "etabs/hamiltonian.hpp"
#include "etabs/lattice.hpp"
#include "etabs/metric.hpp"
#include "etabs/pricing.hpp"
#include "etabs/spectral.hpp"
#include "etabs/susy.hpp"

#include "oracles/black_scholes.hpp"
#include "oracles/dense.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace etabs;
using namespace support;

namespace {

// Tolerances.
constexpr double kExactMetricTol = 1e-12;
constexpr double kOrderTarget = 2.0;
constexpr double kOrderBand = 0.2;
constexpr double kGramTol = 1e-10;
constexpr double kCompletenessTol = 1e-8;
constexpr double kKernelRelTol = 1e-3;
constexpr double kPriceRelTol = 5e-3;
constexpr double kMartingaleRelTol = 5e-3;
constexpr double kBarrierRelTol = 1e-2;
constexpr double kBoxOrderMin = 1.8;
constexpr double kDeltaRelTol = 1e-15;
constexpr double kAlgebraTol = 1e-12;
constexpr double kPairingTol = 1e-8;

// Runtime budgets in seconds.
constexpr double kBudget1 = 1.0;
constexpr double kBudget3 = 5.0;
constexpr double kBudget5 = 10.0;
constexpr double kBudget10 = 5.0;

const MarketParams kParams{0.2, 0.05};
constexpr double kTau = 0.5;

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* format, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, a);
    return buf;
}

double relative_error(double value, double reference) {
    return std::abs(value - reference) / std::abs(reference);
}

struct NamedOperator {
    std::string name;
    TridiagonalOperator H;
    MetricOperator continuum;
    Lattice lat;
};

std::vector<NamedOperator> criterion_operators(std::size_t n) {
    const Lattice lat = centered_window(std::log(100.0), kParams.sigma, kTau, 6.0, n);
    const auto V = PotentialSpec::sampled(lat, [](double x) { return 0.05 + 0.01 * std::tanh(x); });
    const auto c = PotentialSpec::constant(0.03);
    return {
        {"H_BS", build_H_BS(kParams, lat), continuum_metric_BS(kParams, lat), lat},
        {"generalized", build_H_generalized(kParams.sigma, V, lat),
         continuum_metric_generalized(kParams.sigma, V, lat), lat},
        {"H_eff", build_H_eff(kParams, c, lat), continuum_metric_BS(kParams, lat), lat},
    };
}

Outcome criterion1() {
    Outcome o{true, ""};
    const Lattice lat = centered_window(std::log(100.0), kParams.sigma, kTau, 6.0, 2000);
    const auto V = PotentialSpec::sampled(lat, [](double x) { return 0.05 + 0.01 * std::tanh(x); });
    const std::vector<std::pair<std::string, std::function<TridiagonalOperator()>>> builders = {
        {"H_BS", [&] { return build_H_BS(kParams, lat); }},
        {"generalized", [&] { return build_H_generalized(kParams.sigma, V, lat); }},
        {"H_eff", [&] { return build_H_eff(kParams, PotentialSpec::constant(0.03), lat); }},
    };
    for (const auto& [name, build] : builders) {
        const Stopwatch sw;
        const TridiagonalOperator H = build();
        const double res = pseudo_hermiticity_residual(H, detailed_balance_metric(H));
        const double t = sw.seconds();
        o.pass = o.pass && res <= kExactMetricTol && t < kBudget1;
        o.detail += name + " " + fmt("%.2e", res) + " (" + fmt("%.3fs", t) + ") ";
    }
    return o;
}

Outcome criterion2() {
    Outcome o{true, ""};
    const std::vector<std::size_t> sizes = {250, 500, 1000, 2000};
    std::vector<std::vector<double>> err(3);
    std::vector<double> h;
    std::vector<std::string> names;
    for (std::size_t n : sizes) {
        const auto ops = criterion_operators(n);
        h.push_back(ops[0].H.dx);
        for (std::size_t k = 0; k < ops.size(); ++k) {
            err[k].push_back(pseudo_hermiticity_residual(ops[k].H, ops[k].continuum));
            if (names.size() < ops.size()) names.push_back(ops[k].name);
        }
    }
    for (std::size_t k = 0; k < err.size(); ++k) {
        const double p = observed_order(h, err[k]);
        o.pass = o.pass && std::abs(p - kOrderTarget) <= kOrderBand;
        o.detail += names[k] + " order " + fmt("%.3f", p) + " ";
    }
    o.detail += "(target 2.0 +/- 0.2)";
    return o;
}

Outcome criterion3() {
    Outcome o{true, ""};
    for (const auto& op : criterion_operators(1000)) {
        const Stopwatch sw;
        const auto d = decompose(op.H, quadrature_weights(op.lat), op.continuum.eta[0]);
        const double gram = eta_gram_residual(d);
        const double comp = completeness_residual(d);
        bool real = d.metric().is_positive();
        for (double e : d.eigenvalues()) real = real && std::isfinite(e);
        const double t = sw.seconds();
        o.pass = o.pass && real && gram <= kGramTol && comp <= kCompletenessTol && t < kBudget3;
        o.detail += op.name + " gram " + fmt("%.1e", gram) + " compl " + fmt("%.1e", comp) + " (" +
                    fmt("%.2fs", t) + ") ";
    }
    return o;
}

Outcome criterion4() {
    const std::size_t n = 2000;
    const double half = 3.0 * 6.0 * kParams.sigma * std::sqrt(kTau);
    const double dx = 2.0 * half / static_cast<double>(n + 1);
    // Shift by half a cell so that x = 0 is node 999.
    const Lattice lat(-1000.0 * dx, 1001.0 * dx, n);
    const std::size_t i0 = 999;
    const auto d = decompose(build_H_BS(kParams, lat), quadrature_weights(lat),
                             continuum_metric_BS(kParams, lat).eta[0]);
    const auto row = kernel_row(d, kTau, i0);
    const double density = row[i0] / lat.dx();
    const double exact = oracle::bs_kernel(0.0, 0.0, kParams.sigma, kParams.r, kTau);
    const double rel = relative_error(density, exact);
    return {std::abs(lat[i0]) < 1e-12 && rel <= kKernelRelTol && std::abs(exact - 2.7359) < 5e-5,
            "p(0,0) = " + fmt("%.6f", density) + " vs " + fmt("%.6f", exact) + " rel " +
                fmt("%.2e", rel)};
}

Outcome criterion5() {
    const Stopwatch sw;
    const double K = 100.0;
    const Lattice lat = centered_window(std::log(K), kParams.sigma, kTau, 6.0, 2000);
    const auto d = decompose(build_H_BS(kParams, lat), quadrature_weights(lat),
                             continuum_metric_BS(kParams, lat).eta[0]);
    const auto call = price(d, lat, PayoffSpec::call(K), kTau);
    const auto put = price(d, lat, PayoffSpec::put(K), kTau);

    const double atm = call.at_spot(100.0);
    bool pass = relative_error(atm, 6.889) <= kPriceRelTol &&
                relative_error(atm, oracle::bs_call(100, K, 0.2, 0.05, kTau)) <= kPriceRelTol;
    double worst_sweep = 0.0;
    double worst_parity = 0.0;
    for (double m = 0.8; m <= 1.2 + 1e-9; m += 0.05) {
        const double S = m * K;
        worst_sweep = std::max(
            worst_sweep, relative_error(call.at_spot(S), oracle::bs_call(S, K, 0.2, 0.05, kTau)));
        const double forward = S - K * std::exp(-kParams.r * kTau);
        worst_parity =
            std::max(worst_parity, relative_error(call.at_spot(S) - put.at_spot(S), forward));
    }
    const double t = sw.seconds();
    pass = pass && worst_sweep <= kPriceRelTol && worst_parity <= kPriceRelTol && t < kBudget5;
    return {pass, "C(100) = " + fmt("%.5f", atm) + " sweep " + fmt("%.1e", worst_sweep) +
                      " parity " + fmt("%.1e", worst_parity) + " (" + fmt("%.2fs", t) + ")"};
}

Outcome criterion6() {
    const Lattice lat = centered_window(std::log(100.0), kParams.sigma, kTau, 6.0, 2000);
    std::vector<double> g(lat.size());
    for (std::size_t i = 0; i < lat.size(); ++i) g[i] = std::exp(lat[i]);
    const auto surface = price_european(kParams, PayoffSpec::tabulated(g), kTau, lat);
    // Mid-lattice: within one standard deviation sigma sqrt(tau) of the centre.
    const double centre = 0.5 * (lat.x_min() + lat.x_max());
    const double band = kParams.sigma * std::sqrt(kTau);
    double worst = 0.0;
    for (std::size_t i = 0; i < lat.size(); ++i) {
        if (std::abs(lat[i] - centre) <= band) {
            worst = std::max(worst, relative_error(surface.values[i], g[i]));
        }
    }
    return {worst <= kMartingaleRelTol,
            "max rel dev " + fmt("%.2e", worst) + " within sigma sqrt(tau) of the centre"};
}

Outcome criterion7() {
    const double B = 80.0;
    const Lattice lat =
        align_to(centered_window(std::log(100.0), kParams.sigma, kTau, 6.0, 2000), std::log(B));
    const auto surface = price_barrier_down_and_out(kParams, 100.0, B, kTau, lat);
    const double value = surface.at_spot(100.0);
    const double exact = oracle::down_and_out_call(100, 100, B, 0.2, 0.05, kTau);
    const double rel = relative_error(value, exact);
    const bool exponent_match =
        oracle::image_exponent(kParams.sigma, kParams.r) == -metric_exponent(kParams);
    return {rel <= kBarrierRelTol && exponent_match,
            "DO = " + fmt("%.5f", value) + " vs " + fmt("%.5f", exact) + " rel " + fmt("%.2e", rel) +
                ", exponent match " + (exponent_match ? "exact" : "NO")};
}

Outcome criterion8() {
    const double lo = std::log(80.0);
    const double hi = std::log(125.0);
    const double L = hi - lo;
    const double delta = oracle::box_eigenvalue(0, L, kParams.sigma,
                                                (0.02 + 0.05) * (0.02 + 0.05) / (2 * 0.04));
    std::vector<double> h, err;
    for (std::size_t n : {100u, 200u, 400u, 800u}) {
        const double dx = L / static_cast<double>(n + 1);
        const std::size_t pad = 10;
        const Lattice full(lo - pad * dx, hi + pad * dx, n + 2 * pad);
        const auto problem = knock_out_problem(kParams, PayoffSpec::call(100.0), full, 80.0, 125.0);
        if (problem.region.size() != n) return {false, "walls did not land on the grid"};
        const auto d = decompose(problem.H, quadrature_weights(problem.active), problem.eta_anchor);
        double worst = 0.0;
        for (int k = 1; k <= 10; ++k) {
            worst = std::max(worst, std::abs(d.eigenvalues()[k - 1] -
                                             oracle::box_eigenvalue(k, L, kParams.sigma, delta)));
        }
        h.push_back(dx);
        err.push_back(worst);
    }
    const double p = observed_order(h, err);
    return {p >= kBoxOrderMin, "k<=10 max err " + fmt("%.2e", err.back()) + " at n=800, order " +
                                   fmt("%.3f", p)};
}

Outcome criterion9() {
    std::mt19937_64 rng(20260101);
    std::uniform_real_distribution<double> sig(0.05, 1.0);
    std::uniform_real_distribution<double> rate(0.0, 0.2);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const MarketParams p{sig(rng), rate(rng)};
        const double s2 = p.sigma * p.sigma;
        const double expected = (s2 / 2.0 + p.r) * (s2 / 2.0 + p.r) / (2.0 * s2);
        worst = std::max(worst, relative_error(delta(p), expected));
    }
    return {worst <= kDeltaRelTol, "max rel diff " + fmt("%.2e", worst) + " over 1000 draws"};
}

Superpotential superpotential(const Lattice& lat, int which) {
    switch (which) {
    case 0: return Superpotential::analytic(lat, [](double) { return 0.0; }, [](double) { return 0.0; });
    case 1: return Superpotential::analytic(lat, [](double x) { return x; }, [](double) { return 1.0; });
    default:
        return Superpotential::analytic(
            lat, [](double x) { return std::tanh(x); },
            [](double x) { return 1.0 / (std::cosh(x) * std::cosh(x)); });
    }
}

Outcome criterion10() {
    const Stopwatch sw;
    const Lattice lat(-4.0, 4.0, 500);
    const char* names[] = {"W=0", "W=x", "W=tanh x"};
    Outcome o{true, ""};
    for (int w = 0; w < 3; ++w) {
        const auto sys = factorized_system(kParams, superpotential(lat, w), lat,
                                           continuum_metric_BS(kParams, lat));
        const auto r = verify_susy(sys);
        const double worst = std::max({r.anticommutator, r.commutator_Q, r.commutator_Q_sharp,
                                       r.nilpotency_Q, r.nilpotency_Q_sharp,
                                       r.pseudo_hermiticity_super});
        o.pass = o.pass && worst <= kAlgebraTol;
        o.detail += std::string(names[w]) + " " + fmt("%.1e", worst) + " ";
    }
    const double t = sw.seconds();
    o.pass = o.pass && t < kBudget10;
    o.detail += "(" + fmt("%.2fs", t) + ")";
    return o;
}

Outcome criterion11() {
    const Lattice lat(-4.0, 4.0, 500);
    const auto rep = verify_susy(
        factorized_system(kParams, superpotential(lat, 1), lat, continuum_metric_BS(kParams, lat)));

    const Lattice small(-2.0, 2.0, 12);
    const auto sys =
        factorized_system(kParams, superpotential(small, 1), small, continuum_metric_BS(kParams, small));
    const auto r12 = verify_susy(sys);
    const auto A = oracle::to_dense(sys.A);
    const auto As = oracle::to_dense(sys.A_sharp);
    const auto eff = oracle::dense_eigenvalues(oracle::multiply(As, A, 12), 12);
    const auto par = oracle::dense_eigenvalues(oracle::multiply(A, As, 12), 12);
    double dense = std::max(eff.max_imag, par.max_imag);
    for (std::size_t k = 0; k < 12; ++k) {
        dense = std::max(dense, std::abs(r12.spectrum_eff[k] - eff.real[k]) / std::max(1.0, eff.real[k]));
        dense = std::max(dense, std::abs(r12.spectrum_partner[k] - par.real[k]) / std::max(1.0, par.real[k]));
    }
    return {rep.pairing <= kPairingTol && r12.pairing <= kPairingTol && dense <= kPairingTol,
            "pairing n=500 " + fmt("%.1e", rep.pairing) + ", dense n=12 " + fmt("%.1e", dense)};
}

Outcome criterion12() {
    const MarketParams limit{0.2, 0.02};
    const Lattice lat(-4.0, 4.0, 500);
    bool pass = true;
    for (int w = 0; w < 3; ++w) {
        const auto sys = factorized_system(limit, superpotential(lat, w), lat,
                                           continuum_metric_BS(limit, lat));
        const auto r = verify_susy(sys);
        pass = pass && r.eta_constant && r.a_sharp_is_transpose && r.classical_susy &&
               sys.A_sharp == sys.A.transpose();
    }
    return {pass, "r = sigma^2/2: eta constant, A# == A^T, classical flag"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"exact metric residual", criterion1},
        {"continuum metric order", criterion2},
        {"eta-orthonormality and completeness", criterion3},
        {"kernel oracle", criterion4},
        {"European price oracle", criterion5},
        {"martingale invariant", criterion6},
        {"down-and-out oracle", criterion7},
        {"double-knock-out spectrum", criterion8},
        {"delta identity", criterion9},
        {"susy algebra", criterion10},
        {"spectral pairing", criterion11},
        {"Hermitian limit", criterion12},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const Stopwatch sw;
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s %2zu %-36s %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", k + 1,
                    criteria[k].first.c_str(), o.detail.c_str(), sw.seconds());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
