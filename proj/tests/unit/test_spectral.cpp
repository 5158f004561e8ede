#include "etabs/error.hpp"
#include "etabs/hamiltonian.hpp"
#include "etabs/metric.hpp"
#include "etabs/pricing.hpp"
#include "etabs/spectral.hpp"

#include "oracles/black_scholes.hpp"
#include "oracles/dense.hpp"

#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>

using namespace etabs;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const MarketParams kParams{0.2, 0.05};

double delta_of(const MarketParams& p) {
    const double b = 0.5 * p.sigma * p.sigma - p.r;
    return b * b / (2.0 * p.sigma * p.sigma) + p.r;
}

}  // namespace

TEST_CASE("symmetrize") {
    SECTION("Hermitian limit leaves H unchanged") {
        const Lattice lat = make_lattice(0.0, 1.0, 10);
        const auto H = build_H_BS(MarketParams{0.2, 0.02}, lat);
        const auto sym = symmetrize(H, detailed_balance_metric(H, 4.0));
        for (double s : sym.scaling) CHECK(s == 2.0);
        CHECK(sym.S == H);
    }
    SECTION("off-diagonal is the geometric mean") {
        const Lattice lat = make_lattice(0.0, 1.1, 10);
        const auto H = build_H_BS(kParams, lat);
        const auto sym = symmetrize(H, detailed_balance_metric(H));
        CHECK(sym.S.is_symmetric());
        for (double v : sym.S.upper) CHECK_THAT(v, WithinAbs(-1.99437, 1e-5));
        for (double v : sym.S.upper) CHECK_THAT(v, WithinRel(-std::sqrt(2.15 * 1.85), 1e-12));
    }
    SECTION("spectrum matches a dense nonsymmetric solve") {
        for (std::size_t n : {3u, 7u, 12u}) {
            const Lattice lat = make_lattice(-0.5, 0.7, n);
            const auto V = PotentialSpec::sampled(lat, [](double x) { return 0.05 + 0.01 * std::tanh(x); });
            for (const auto& H : {build_H_BS(kParams, lat), build_H_generalized(0.2, V, lat)}) {
                const auto sym = symmetrize(H, detailed_balance_metric(H));
                const auto ours = eigendecompose(sym.S).values;
                const auto ref = oracle::dense_eigenvalues(oracle::to_dense(H), n);
                CHECK(ref.max_imag < 1e-8);
                for (std::size_t k = 0; k < n; ++k) CHECK_THAT(ours[k], WithinRel(ref.real[k], 1e-8));
            }
        }
    }
    CHECK_THROWS_AS(eigendecompose(build_H_BS(kParams, make_lattice(0.0, 1.0, 5))), ValidationError);
}

TEST_CASE("eta normalization") {
    const Lattice lat = make_lattice(0.0, 1.0, 40);
    const auto H = build_H_BS(MarketParams{0.2, 0.02}, lat);
    const MetricOperator one{std::vector<double>(lat.size(), 1.0)};
    const auto w = quadrature_weights(lat);
    const auto vectors = eigendecompose(symmetrize(H, one).S);
    const auto psi = eta_normalize(vectors, one, w);
    for (std::size_t k = 0; k < lat.size(); ++k)
        for (std::size_t i = 0; i < lat.size(); ++i)
            CHECK_THAT(psi[k * lat.size() + i], WithinAbs(vectors.vector(k)[i] / std::sqrt(lat.dx()), 1e-12));
}

TEST_CASE("eta-orthonormality and completeness") {
    const Lattice lat = centered_window(std::log(100.0), 0.2, 0.5, 6.0, 400);
    const auto V = PotentialSpec::sampled(lat, [](double x) { return 0.05 + 0.01 * std::tanh(x - 4.6); });
    for (const auto& H : {build_H_BS(kParams, lat), build_H_generalized(0.2, V, lat)}) {
        const auto cont = continuum_metric_BS(kParams, lat);
        const auto d = decompose(H, quadrature_weights(lat), cont.eta[0]);
        CHECK(eta_gram_residual(d) <= 1e-10);
        CHECK(completeness_residual(d) <= 1e-8);
        for (double r : eta_norm_residuals(d)) CHECK(r <= 1e-12);
        for (std::size_t k = 1; k < d.size(); ++k) CHECK(d.eigenvalues()[k] >= d.eigenvalues()[k - 1]);
    }
}

TEST_CASE("pseudo inner product") {
    const Lattice lat = make_lattice(0.0, 1.0, 30);
    const auto H = build_H_BS(kParams, lat);
    const auto w = quadrature_weights(lat);
    const auto d = decompose(H, w);
    const auto psi0 = d.eigenfunction(0);
    CHECK_THAT(pseudo_inner_product(psi0, psi0, d.metric(), w), WithinAbs(1.0, 1e-10));

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> f(30), g(30);
    for (auto& v : f) v = u(rng);
    for (auto& v : g) v = u(rng);
    CHECK(pseudo_inner_product(f, g, d.metric(), w) == pseudo_inner_product(g, f, d.metric(), w));
    const MetricOperator one{std::vector<double>(30, 1.0)};
    double plain = 0.0;
    for (std::size_t i = 0; i < 30; ++i) plain += lat.dx() * f[i] * g[i];
    CHECK_THAT(pseudo_inner_product(f, g, one, w), WithinRel(plain, 1e-14));
    CHECK_THROWS_AS(pseudo_inner_product(f, std::vector<double>(3), one, w), ValidationError);
}

TEST_CASE("pricing kernel") {
    const double tau = 0.5;
    const double half = 18.0 * 0.2 * std::sqrt(tau);
    const std::size_t n = 801;
    const double dx = 2.0 * half / (n + 1);
    const Lattice lat = make_lattice(-400.0 * dx, 402.0 * dx, n);  // node 399 sits at x = 0
    REQUIRE_THAT(lat[399], WithinAbs(0.0, 1e-12));
    const auto H = build_H_BS(kParams, lat);
    const auto w = quadrature_weights(lat);
    const auto d = decompose(H, w, continuum_metric_BS(kParams, lat).eta[0]);

    SECTION("Gaussian density at x = x' = 0") {
        const auto row = kernel_row(d, tau, 399);
        CHECK_THAT(row[399] / w[399], WithinRel(oracle::bs_kernel(0.0, 0.0, 0.2, 0.05, tau), 5e-3));
        CHECK_THAT(oracle::bs_kernel(0.0, 0.0, 0.2, 0.05, tau), WithinAbs(2.7359, 5e-5));
        for (std::size_t j : {369u, 389u, 409u, 429u}) {
            CHECK_THAT(row[j] / w[j], WithinRel(oracle::bs_kernel(0.0, lat[j], 0.2, 0.05, tau), 5e-3));
        }
    }
    SECTION("discounted row mass is one") {
        const auto row = kernel_row(d, tau, 399);
        double mass = 0.0;
        for (double v : row) mass += v;
        CHECK_THAT(mass * std::exp(0.05 * tau), WithinAbs(1.0, 1e-6));
    }
    SECTION("full kernel rows equal kernel_row and evolve") {
        const Lattice small = make_lattice(-1.0, 1.0, 120);
        const auto ds = decompose(build_H_BS(kParams, small), quadrature_weights(small));
        const auto K = pricing_kernel(ds, 0.1);
        const auto row = kernel_row(ds, 0.1, 37);
        for (std::size_t j = 0; j < 120; ++j) CHECK_THAT(K(37, j), WithinAbs(row[j], 1e-14));
        std::vector<double> g(120);
        for (std::size_t i = 0; i < 120; ++i) g[i] = std::exp(-small[i] * small[i] * 10.0);
        const auto v = evolve(ds, 0.1, g);
        double direct = 0.0;
        for (std::size_t j = 0; j < 120; ++j) direct += K(37, j) * g[j];
        CHECK_THAT(v[37], WithinAbs(direct, 1e-13));
    }
}

TEST_CASE("kernel semigroup") {
    const Lattice lat = make_lattice(-1.0, 1.0, 150);
    const auto d = decompose(build_H_BS(kParams, lat), quadrature_weights(lat));
    const auto a = pricing_kernel(d, 0.2);
    const auto b = pricing_kernel(d, 0.3);
    const auto c = pricing_kernel(d, 0.5);
    const std::size_t n = lat.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += a(i, k) * b(k, j);
            worst = std::max(worst, std::abs(s - c(i, j)));
        }
    CHECK(worst <= 1e-8);
}

TEST_CASE("short horizons reproduce the payoff") {
    const Lattice lat = make_lattice(-1.0, 1.0, 300);
    const auto d = decompose(build_H_BS(kParams, lat), quadrature_weights(lat));
    std::vector<double> g(lat.size());
    for (std::size_t i = 0; i < lat.size(); ++i) g[i] = std::exp(-20.0 * lat[i] * lat[i]);
    for (double tau : {1e-3, 1e-4}) {
        const auto v = evolve(d, tau, g);
        double worst = 0.0;
        for (std::size_t i = 0; i < lat.size(); ++i) worst = std::max(worst, std::abs(v[i] - g[i]));
        CHECK(worst < 200.0 * tau);
    }
}

TEST_CASE("decay warnings") {
    const Lattice lat = make_lattice(-1.0, 1.0, 20);
    const auto d = decompose(build_H_BS(kParams, lat), quadrature_weights(lat));
    CHECK_FALSE(decay_warnings(d, 1e-4).empty());
    CHECK(decay_warnings(d, 10.0).empty());
    CHECK_FALSE(pricing_kernel(d, 1e-4).warnings.empty());
    CHECK_THROWS_AS(kernel_row(d, -1.0, 0), ValidationError);
}

TEST_CASE("spectral lower bound and box convergence") {
    std::vector<double> errs;
    for (std::size_t n : {200u, 400u}) {
        const Lattice lat = make_lattice(0.0, 1.0, n);
        const auto d = decompose(build_H_BS(kParams, lat), quadrature_weights(lat));
        const double delta = delta_of(kParams);
        CHECK(d.eigenvalues()[0] > delta);
        errs.push_back(std::abs(d.eigenvalues()[0] - oracle::box_eigenvalue(1, 1.0, 0.2, delta)));
    }
    CHECK(errs[1] < errs[0] / 3.5);
}

TEST_CASE("decomposition is deterministic across thread counts") {
    const Lattice lat = make_lattice(-1.0, 1.0, 300);
    const auto H = build_H_BS(kParams, lat);
    const auto w = quadrature_weights(lat);
    const auto a = decompose(H, w, 1.0, 1);
    const auto b = decompose(H, w, 1.0, 4);
    for (std::size_t k = 0; k < a.size(); ++k) {
        REQUIRE(a.eigenvalues()[k] == b.eigenvalues()[k]);
        for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a.eigenfunction(k)[i] == b.eigenfunction(k)[i]);
    }
    CHECK(eta_gram_residual(a, 1) == eta_gram_residual(a, 3));
    CHECK(completeness_residual(a, 1) == completeness_residual(a, 3));
}
