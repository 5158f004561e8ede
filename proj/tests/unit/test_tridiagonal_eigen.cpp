#include "etabs/hamiltonian.hpp"
#include "etabs/spectral.hpp"
#include "etabs/tridiagonal_eigen.hpp"

#include <Eigen/Dense>

#include "catch_amalgamated.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace etabs;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double orthogonality(const TridiagonalEigen& e) {
    const std::size_t n = e.size();
    double worst = 0.0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += e.vector(a)[i] * e.vector(b)[i];
            worst = std::max(worst, std::abs(dot - (a == b ? 1.0 : 0.0)));
        }
    return worst;
}

double eigen_residual(const std::vector<double>& d, const std::vector<double>& off,
                      const TridiagonalEigen& e) {
    const std::size_t n = d.size();
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto v = e.vector(k);
        for (std::size_t i = 0; i < n; ++i) {
            double y = d[i] * v[i];
            if (i > 0) y += off[i - 1] * v[i - 1];
            if (i + 1 < n) y += off[i] * v[i + 1];
            worst = std::max(worst, std::abs(y - e.values[k] * v[i]));
        }
    }
    return worst;
}

}  // namespace

TEST_CASE("2x2 analytic case") {
    const std::vector<double> d = {2.0, 2.0};
    const std::vector<double> off = {-1.0};
    const auto e = symmetric_tridiagonal_eigen(d, off);
    CHECK_THAT(e.values[0], WithinAbs(1.0, 1e-15));
    CHECK_THAT(e.values[1], WithinAbs(3.0, 1e-15));
    CHECK_THAT(e.vector(0)[0], WithinAbs(std::sqrt(0.5), 1e-15));
    CHECK_THAT(e.vector(0)[1], WithinAbs(std::sqrt(0.5), 1e-15));
    const auto values = symmetric_tridiagonal_eigenvalues(d, off);
    CHECK(values == e.values);
}

TEST_CASE("free Dirichlet Laplacian spectrum") {
    const double sigma = 0.2;
    const std::size_t n = 300;
    const Lattice lat = make_lattice(0.0, 1.0, n);
    const auto H = build_H_generalized(sigma, PotentialSpec::constant(0.5 * sigma * sigma), lat);
    const double shift = 0.5 * sigma * sigma;
    const auto values = symmetric_tridiagonal_eigenvalues(H.diag, H.upper);
    const double scale = sigma * sigma / (lat.dx() * lat.dx());
    for (std::size_t k = 1; k <= n; ++k) {
        const double exact = scale * (1.0 - std::cos(k * std::numbers::pi / (n + 1))) + shift;
        CHECK_THAT(values[k - 1], WithinAbs(exact, 1e-12 * scale));
    }
}

TEST_CASE("agreement with a dense symmetric solver") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t n : {1u, 5u, 50u, 200u}) {
        std::vector<double> d(n), off(n ? n - 1 : 0);
        for (auto& v : d) v = u(rng);
        for (auto& v : off) v = u(rng);
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = d[i];
            if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = off[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(m);
        for (auto method : {EigenvectorMethod::inverse_iteration, EigenvectorMethod::ql_accumulation}) {
            const auto e = symmetric_tridiagonal_eigen(d, off, 1, method);
            for (std::size_t k = 0; k < n; ++k) CHECK_THAT(e.values[k], WithinAbs(ref.eigenvalues()[k], 1e-13));
            CHECK(orthogonality(e) < 1e-12);
            CHECK(eigen_residual(d, off, e) < 1e-12);
        }
    }
}

TEST_CASE("clustered eigenvalues keep orthogonal vectors") {
    // Wilkinson W21+: eigenvalue pairs agreeing to many digits.
    const std::size_t n = 21;
    std::vector<double> d(n), off(n - 1, 1.0);
    for (std::size_t i = 0; i < n; ++i) d[i] = std::abs(10.0 - static_cast<double>(i));
    for (auto method : {EigenvectorMethod::inverse_iteration, EigenvectorMethod::ql_accumulation}) {
        const auto e = symmetric_tridiagonal_eigen(d, off, 1, method);
        CHECK(orthogonality(e) < 1e-12);
        CHECK(eigen_residual(d, off, e) < 1e-12);
    }
    // A matrix with exactly repeated blocks.
    std::vector<double> d2(40, 2.0), off2(39, -1.0);
    off2[19] = 0.0;
    const auto e2 = symmetric_tridiagonal_eigen(d2, off2, 1);
    CHECK(orthogonality(e2) < 1e-12);
    CHECK(eigen_residual(d2, off2, e2) < 1e-12);
}

TEST_CASE("both eigenvector routes agree") {
    const Lattice lat = make_lattice(-1.0, 1.0, 400);
    const auto S = symmetrize(build_H_BS(MarketParams{0.2, 0.05}, lat),
                              MetricOperator{std::vector<double>(lat.size(), 1.0)})
                       .S;
    const auto a = symmetric_tridiagonal_eigen(S.diag, S.upper, 1, EigenvectorMethod::inverse_iteration);
    const auto b = symmetric_tridiagonal_eigen(S.diag, S.upper, 1, EigenvectorMethod::ql_accumulation);
    CHECK(a.values == b.values);
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        for (std::size_t i = 0; i < a.size(); ++i)
            worst = std::max(worst, std::abs(a.vector(k)[i] - b.vector(k)[i]));
    CHECK(worst < 1e-10);
}

TEST_CASE("results do not depend on the thread count") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t n = 300;
    std::vector<double> d(n), off(n - 1);
    for (auto& v : d) v = u(rng);
    for (auto& v : off) v = u(rng);
    for (auto method : {EigenvectorMethod::inverse_iteration, EigenvectorMethod::ql_accumulation}) {
        const auto one = symmetric_tridiagonal_eigen(d, off, 1, method);
        const auto three = symmetric_tridiagonal_eigen(d, off, 3, method);
        const auto eight = symmetric_tridiagonal_eigen(d, off, 8, method);
        CHECK(one.values == three.values);
        CHECK(one.vectors == three.vectors);
        CHECK(one.vectors == eight.vectors);
    }
}

TEST_CASE("eigenvalues are translation covariant") {
    const double c = 0.731;
    const Lattice lat = make_lattice(-1.0, 1.0, 300);
    const Lattice moved = make_lattice(-1.0 + c, 1.0 + c, 300);
    const auto V = [](double x) { return 0.05 + 0.02 * std::tanh(3.0 * x); };
    const auto H = build_H_generalized(0.2, PotentialSpec::sampled(lat, V), lat);
    const auto Hm = build_H_generalized(0.2, PotentialSpec::sampled(moved, [&](double x) { return V(x - c); }), moved);
    const auto w = quadrature_weights(lat);
    const auto da = decompose(H, w);
    const auto db = decompose(Hm, quadrature_weights(moved));
    const auto a = da.eigenvalues();
    const auto b = db.eigenvalues();
    for (std::size_t k = 0; k < a.size(); ++k) CHECK_THAT(a[k], WithinAbs(b[k], 1e-10 * std::max(1.0, a[k])));
}

TEST_CASE("size mismatch is rejected") {
    const std::vector<double> d = {1.0, 2.0, 3.0};
    const std::vector<double> off = {1.0};
    CHECK_THROWS(symmetric_tridiagonal_eigen(d, off));
    CHECK_THROWS(symmetric_tridiagonal_eigenvalues(d, off));
}
