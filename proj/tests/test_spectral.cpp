#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "frachs/extension.hpp"
#include "frachs/spectral.hpp"
#include "test_helpers.hpp"

using namespace frachs;
namespace ft = frachs::testing;
constexpr double kPi = std::numbers::pi;

namespace {

// Closed-form spectrum of the discrete interval Laplacian on (0,L):
// lambda_j = (2/h^2)(1 - cos(j pi h / L)).
double interval_lambda(int j, int m, double len) {
    const double h = len / (m + 1);
    return 2.0 / (h * h) * (1.0 - std::cos(j * kPi * h / len));
}

}  // namespace

TEST_CASE("dirichlet laplacian eigen oracle on (0,pi)") {
    const auto g = Grid::interval(0.0, kPi, 200);
    const DirichletOperator op(g);
    const auto dec = eigenpairs(op, 5);

    SUBCASE("eigenvalues match the discrete closed form and approach j^2") {
        for (int j = 1; j <= 5; ++j) {
            CHECK(dec.lambdas[j - 1] ==
                  doctest::Approx(interval_lambda(j, 200, kPi)).epsilon(1e-12));
            CHECK(dec.lambdas[j - 1] == doctest::Approx(j * j).epsilon(2e-3));
        }
    }
    SUBCASE("eigenvectors match sine modes up to sign") {
        for (int j = 1; j <= 3; ++j) {
            GridFunction sj = GridFunction::sample(
                g, [&](double x) { return std::sqrt(2.0 / kPi) * std::sin(j * x); });
            const double ip = g.cell_weight() * dec.phis.col(j - 1).dot(sj.values);
            CHECK(std::abs(ip) == doctest::Approx(1.0).epsilon(1e-3));
        }
    }
    SUBCASE("orthonormality and residual invariants") {
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                const double ip = g.cell_weight() * dec.phis.col(i).dot(dec.phis.col(j));
                CHECK(ip == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
            }
        for (int j = 0; j < 5; ++j) {
            const Eigen::VectorXd r =
                op.apply(dec.phis.col(j)) - dec.lambdas[j] * dec.phis.col(j);
            CHECK(std::sqrt(g.cell_weight()) * r.norm() <= 1e-8 * dec.lambdas[j]);
        }
    }
}

TEST_CASE("2D box spectrum") {
    const auto g = Grid::box(0.0, kPi, 24, 0.0, kPi, 24);
    const auto dec = eigenpairs(DirichletOperator(g), 4);
    CHECK(dec.lambdas[0] == doctest::Approx(2.0).epsilon(2e-2));
    // lambda_2 = lambda_3 = 5 (degenerate), lambda_4 = 8
    CHECK(dec.lambdas[1] == doctest::Approx(5.0).epsilon(2e-2));
    CHECK(dec.lambdas[2] == doctest::Approx(5.0).epsilon(2e-2));
    CHECK(dec.lambdas[3] == doctest::Approx(8.0).epsilon(2e-2));
}

TEST_CASE("constant function violates dirichlet exterior data") {
    const auto g = Grid::interval(0.0, kPi, 50);
    const DirichletOperator op(g);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(50);
    const Eigen::VectorXd a1 = op.apply(ones);
    CHECK(a1.lpNorm<Eigen::Infinity>() > 1.0);  // boundary rows feel the zeros
    CHECK(a1.segment(1, 48).lpNorm<Eigen::Infinity>() == doctest::Approx(0.0));
}

TEST_CASE("trace identity and Perron property on a tiny grid") {
    const auto g = Grid::interval(0.0, 1.0, 10);
    const DirichletOperator op(g);
    const auto dec = eigenpairs(op, 10);
    CHECK(dec.lambdas.sum() == doctest::Approx(op.trace()).epsilon(1e-10));
    // ground mode has no sign change
    bool pos = dec.phis.col(0).minCoeff() > 0.0;
    bool neg = dec.phis.col(0).maxCoeff() < 0.0;
    CHECK((pos || neg));
}

TEST_CASE("spectral form examples") {
    const auto g = Grid::interval(0.0, kPi, 200);
    const auto dec = eigenpairs(DirichletOperator(g), 200);

    SUBCASE("single eigenmode reproduces lambda^s") {
        GridFunction u;
        u.grid = g;
        u.values = dec.phis.col(0);
        for (double s : {0.3, 0.5, 0.7}) {
            CHECK(spectral_form(dec, u, s) ==
                  doctest::Approx(std::pow(dec.lambdas[0], s)).epsilon(1e-10));
            CHECK(spectral_form(dec, u, s) == doctest::Approx(1.0).epsilon(1e-3));
        }
    }
    SUBCASE("two-mode sum at s = 1/2") {
        GridFunction u;
        u.grid = g;
        u.values = dec.phis.col(0) + dec.phis.col(1);
        CHECK(spectral_form(dec, u, 0.5) == doctest::Approx(3.0).epsilon(1e-3));
    }
    SUBCASE("zero function") {
        CHECK(spectral_form(dec, GridFunction::zero(g), 0.5) == 0.0);
    }
    SUBCASE("s=1 equals the stencil energy") {
        std::mt19937_64 rng(7);
        const auto u = ft::sample_bump(g, ft::random_bump(rng, 0.0, kPi));
        const double a = spectral_form(dec, u, 1.0);
        const double b = DirichletOperator(g).stencil_energy(u);
        CHECK(a == doctest::Approx(b).epsilon(1e-10));
    }
}

TEST_CASE("riesz form") {
    const auto g = Grid::interval(0.0, kPi, 200);
    SUBCASE("zero") { CHECK(riesz_form(GridFunction::zero(g), 0.5, 4) == 0.0); }
    SUBCASE("torus factor below 2 rejected") {
        CHECK_THROWS_AS(riesz_form(GridFunction::zero(g), 0.5, 1), std::invalid_argument);
    }
    SUBCASE("s=1 matches the gradient quadrature within 2%") {
        std::mt19937_64 rng(11);
        const auto u = ft::sample_bump(g, ft::random_bump(rng, 0.0, kPi));
        const double fd = DirichletOperator(g).stencil_energy(u);
        CHECK(riesz_form(u, 1.0, 4) == doctest::Approx(fd).epsilon(0.02));
    }
    SUBCASE("scale invariance under the critical rescaling") {
        // 1D grid: u_rho(x) = rho^{(d-2s)/2} u(rho x) with d = 1
        const double s = 0.4, rho = 2.0;
        const auto fine = Grid::interval(0.0, kPi / rho, 200);
        const auto u = GridFunction::sample(g, [&](double x) { return ft::bump1d(x, 1.6, 0.9); });
        const auto ur = GridFunction::sample(fine, [&](double x) {
            return std::pow(rho, (1.0 - 2.0 * s) / 2.0) * ft::bump1d(rho * x, 1.6, 0.9);
        });
        CHECK(riesz_form(ur, s, 4) == doctest::Approx(riesz_form(u, s, 4)).epsilon(5e-3));
    }
}

TEST_CASE("weighted norm") {
    SUBCASE("zero and sigma=s degenerate weight") {
        const auto g = Grid::box(0.0, 1.0, 24, 0.0, 1.0, 24);
        FracParams p;  // hand-filled test mode: sigma = s kills the weight
        p.n = 3;
        p.s = 0.5;
        p.sigma = 0.5;
        p.two_star_sigma = 2.0 * p.n / (p.n - 2.0 * p.sigma);
        CHECK(weighted_norm(GridFunction::zero(g), p) == 0.0);
        GridFunction one;
        one.grid = g;
        one.values = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(g.size()));
        const double covered = g.cell_weight() * static_cast<double>(g.size());
        CHECK(weighted_norm(one, p) ==
              doctest::Approx(std::pow(covered, 1.0 / p.two_star_sigma)).epsilon(1e-12));
        CHECK(std::pow(weighted_norm(one, p), p.two_star_sigma) ==
              doctest::Approx(1.0).epsilon(0.1));  // approaches the box volume
    }
    SUBCASE("refinement oracle") {
        const auto p = make_params(2, 0.6, 0.3);
        double prev_diff = -1.0;
        double coarse_val = 0.0;
        std::array<double, 3> vals{};
        int k = 0;
        for (int m : {100, 201, 403}) {  // h halves each step
            const auto g = Grid::interval(-1.0, 1.0, m);
            const auto u = GridFunction::sample(g, [](double x) { return ft::bump1d(x, 0.1, 0.7); });
            vals[k++] = weighted_norm(u, p);
        }
        coarse_val = vals[0];
        CHECK(std::abs(vals[1] - vals[0]) < 0.05 * coarse_val);          // O(h) agreement
        CHECK(std::abs(vals[2] - vals[1]) < std::abs(vals[1] - vals[0]));  // converging
    }
}

TEST_CASE("rayleigh quotient properties") {
    const auto g = Grid::interval(0.1, kPi + 0.1, 120);  // origin outside
    const auto dec = eigenpairs(DirichletOperator(g), 120);
    const auto p = make_params(2, 0.5, 0.25);

    SUBCASE("rejects zero") {
        CHECK_THROWS_AS(rayleigh_quotient(dec, GridFunction::zero(g), p), std::invalid_argument);
    }
    SUBCASE("invariant under scaling by 7.3") {
        std::mt19937_64 rng(3);
        auto u = ft::sample_bump(g, ft::random_bump(rng, 0.1, kPi + 0.1));
        const double q1 = rayleigh_quotient(dec, u, p);
        u.values *= 7.3;
        CHECK(rayleigh_quotient(dec, u, p) == doctest::Approx(q1).epsilon(1e-12));
    }
    SUBCASE("modulus decreases the quotient for sign-changing u") {
        GridFunction u;
        u.grid = g;
        u.values = dec.phis.col(0) - 0.8 * dec.phis.col(1);
        GridFunction au;
        au.grid = g;
        au.values = u.values.cwiseAbs();
        CHECK(rayleigh_quotient(dec, au, p) <= rayleigh_quotient(dec, u, p) + 1e-12);
    }
}

TEST_CASE("form inequality on seeded random bumps") {
    const auto g = Grid::interval(0.0, kPi, 300);
    const auto dec = eigenpairs(DirichletOperator(g), 300);
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 12; ++trial) {
        const auto u = ft::sample_bump(g, ft::random_bump(rng, 0.0, kPi));
        for (double s : {0.3, 0.7}) {
            const double gap = spectral_form(dec, u, s) - riesz_form(u, s, 4);
            CHECK(gap > -1e-9);
            if (u.norm_l2() >= 1e-3) CHECK(gap > 0.0);
        }
    }
}

TEST_CASE("modulus monotonicity of the spectral form") {
    const auto g = Grid::interval(0.0, kPi, 150);
    const auto dec = eigenpairs(DirichletOperator(g), 150);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> cdist(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        GridFunction u;
        u.grid = g;
        u.values = Eigen::VectorXd::Zero(150);
        for (int j = 0; j < 6; ++j) u.values += cdist(rng) * dec.phis.col(j);
        GridFunction au;
        au.grid = g;
        au.values = u.values.cwiseAbs();
        for (double s : {0.3, 0.5, 0.7})
            CHECK(spectral_form(dec, au, s) <= spectral_form(dec, u, s) + 1e-10);
    }
}

TEST_CASE("rescaling limit toward the riesz form") {
    // u_rho(x) = rho^{(d-2s)/2} u(rho x) on Omega = (-1,1), d = 1:
    // the Omega-spectral form decreases toward riesz_form(u) as rho grows.
    const double s = 0.5;
    const auto base = Grid::interval(-1.0, 1.0, 400);
    const auto u0 = GridFunction::sample(base, [](double x) { return ft::bump1d(x, 0.0, 0.8); });
    const double target = riesz_form(u0, s, 4);

    const auto g = Grid::interval(-1.0, 1.0, 400);
    const auto dec = eigenpairs(DirichletOperator(g), 400);
    std::array<double, 3> forms{};
    int k = 0;
    for (double rho : {2.0, 4.0, 8.0}) {
        const auto ur = GridFunction::sample(g, [&](double x) {
            return std::pow(rho, (1.0 - 2.0 * s) / 2.0) * ft::bump1d(rho * x, 0.0, 0.8);
        });
        forms[k++] = spectral_form(dec, ur, s);
    }
    CHECK(forms[0] >= forms[1]);
    CHECK(forms[1] >= forms[2]);
    CHECK(forms[2] >= target - 1e-9);
    CHECK(forms[2] == doctest::Approx(target).epsilon(0.05));
}
