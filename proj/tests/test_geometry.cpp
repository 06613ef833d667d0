#include <doctest.h>

#include <cmath>
#include <random>

#include "frachs/geometry.hpp"
#include "frachs/spectral.hpp"

using namespace frachs;

namespace {

std::vector<double> geometric_taus(double lo, int count) {
    std::vector<double> taus;
    for (int k = 0; k < count; ++k) taus.push_back(lo * std::pow(2.0, k));
    return taus;
}

}  // namespace

TEST_CASE("curvature functionals on the concave paraboloid, n = 3") {
    const auto p = make_params(3, 0.6, 0.3);
    const auto bp = BoundaryProfile::power_law(3, -1.0, 2.0);
    const auto rep = curvature_functionals(bp, geometric_taus(0.003, 6), p);

    for (std::size_t i = 0; i < rep.taus.size(); ++i) {
        const double tau = rep.taus[i];
        CHECK(rep.f[i] == doctest::Approx(-tau * tau).epsilon(1e-10));
        CHECK(rep.f1[i] == doctest::Approx(std::pow(tau, 4)).epsilon(1e-10));
        CHECK(rep.f2[i] == doctest::Approx(4.0 * tau * tau).epsilon(1e-10));
        CHECK(rep.f3[i] == doctest::Approx(2.0 * tau).epsilon(1e-10));
    }
    CHECK(rep.alpha_hat == doctest::Approx(2.0).epsilon(0.025));
    CHECK(rep.concave);
    CHECK(rep.rv_ok);
    CHECK(rep.cond_ok);
    CHECK(rep.f1_ok);
    CHECK(rep.all_pass());
}

TEST_CASE("convex control fails the concavity gate") {
    const auto p = make_params(3, 0.6, 0.3);
    const auto bp = BoundaryProfile::power_law(3, 1.0, 2.0);
    const auto rep = curvature_functionals(bp, geometric_taus(0.003, 6), p);
    CHECK_FALSE(rep.concave);
    CHECK_FALSE(rep.all_pass());
}

TEST_CASE("power-law profiles recover their exponent, n = 2") {
    const auto p = make_params(2, 0.6, 0.3);
    for (double alpha : {1.5, 2.0, 2.5}) {
        const auto bp = BoundaryProfile::power_law(2, -1.0, alpha);
        const auto rep = curvature_functionals(bp, geometric_taus(0.002, 6), p);
        CHECK(rep.alpha_hat == doctest::Approx(alpha).epsilon(0.05 / alpha));
        CHECK(rep.concave);
        CHECK(rep.rv_ok);
    }
}

TEST_CASE("power-log profile supported with widened tolerance") {
    const auto p = make_params(2, 0.6, 0.3);
    const auto bp = BoundaryProfile::power_log(2, -1.0, 2.0, 1.0);
    const auto rep = curvature_functionals(bp, geometric_taus(0.0005, 6), p);
    CHECK(rep.concave);
    CHECK(std::abs(rep.alpha_hat - 2.0) < 0.15);
}

TEST_CASE("cauchy-schwarz on sphere averages: f3^2 <= f2") {
    const auto p3 = make_params(3, 0.5, 0.25);
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> cdist(-2.0, -0.2);
    std::uniform_real_distribution<double> adist(1.2, 2.8);
    for (int trial = 0; trial < 10; ++trial) {
        const auto bp = BoundaryProfile::power_law(3, cdist(rng), adist(rng));
        const auto rep = curvature_functionals(bp, geometric_taus(0.004, 5), p3);
        for (std::size_t i = 0; i < rep.taus.size(); ++i)
            CHECK(rep.f3[i] * rep.f3[i] <= rep.f2[i] * (1.0 + 1e-12));
    }
    // anisotropic profile: F = -x1^2 - 2 x2^2 (not constant on circles)
    BoundaryProfile bp;
    bp.r0 = 1.0;
    bp.f = [](const Eigen::VectorXd& x) { return -x[0] * x[0] - 2.0 * x[1] * x[1]; };
    bp.grad = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd g(2);
        g << -2.0 * x[0], -4.0 * x[1];
        return g;
    };
    const auto rep = curvature_functionals(bp, geometric_taus(0.004, 5), p3);
    for (std::size_t i = 0; i < rep.taus.size(); ++i)
        CHECK(rep.f3[i] * rep.f3[i] <= rep.f2[i] * (1.0 + 1e-12));
    CHECK(rep.concave);
}

TEST_CASE("condition implication: (26) trend entails the f1 relation") {
    const auto p = make_params(2, 0.55, 0.3);
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> adist(1.3, 2.6);
    for (int trial = 0; trial < 8; ++trial) {
        const auto bp = BoundaryProfile::power_law(2, -1.0, adist(rng));
        const auto rep = curvature_functionals(bp, geometric_taus(0.002, 6), p);
        if (rep.cond_ok) CHECK(rep.f1_ok);
    }
}

TEST_CASE("flatten map") {
    const auto bp = BoundaryProfile::power_law(2, -1.0, 2.0);
    const auto fm = flatten_map(bp, 0.25, 2);

    SUBCASE("boundary points flatten to the zero level") {
        for (double x1 : {-0.3, 0.05, 0.4}) {
            Eigen::VectorXd x(2), xp(1);
            xp << x1;
            x << x1, bp.f(xp);
            CHECK(fm.forward(x)[1] == doctest::Approx(0.0).epsilon(1e-14));
        }
    }
    SUBCASE("jacobians attached") {
        CHECK(fm.jacobian_x == doctest::Approx(16.0));      // eps^{-2}
        CHECK(fm.jacobian_xt == doctest::Approx(64.0));     // eps^{-3}
        const auto unit = flatten_map(bp, 1.0, 2);
        CHECK(unit.jacobian_x == doctest::Approx(1.0));     // Theta_1 is volume preserving
    }
    SUBCASE("round trip to 1e-12") {
        std::mt19937_64 rng(47);
        std::uniform_real_distribution<double> d(-0.4, 0.4);
        for (int trial = 0; trial < 50; ++trial) {
            Eigen::VectorXd x(2);
            x << d(rng), std::abs(d(rng));
            const Eigen::VectorXd back = fm.inverse(fm.forward(x));
            CHECK((back - x).norm() < 1e-12);
            Eigen::VectorXd xt(3);
            xt << x[0], x[1], std::abs(d(rng)) + 0.1;
            CHECK((fm.inverse_xt(fm.forward_xt(xt)) - xt).norm() < 1e-12);
        }
    }
    SUBCASE("inverse outside the validity radius rejected") {
        Eigen::VectorXd y(2);
        y << 50.0, 1.0;
        CHECK_THROWS_AS(fm.inverse(y), std::invalid_argument);
    }
}

namespace {

struct SweepFixture {
    FracParams p = make_params(2, 0.5, 0.25);
    ReducedMinimizer m = halfspace_minimizer(p, 16.0, 48, 1e-6);
};

}  // namespace

TEST_CASE("trial function assembly") {
    SweepFixture fx;
    const auto bp = BoundaryProfile::power_law(2, -1.0, 2.0);
    const double delta = 0.4, eps = 0.1;
    const auto g = Grid::box(-0.6, 0.6, 96, -0.3, 0.6, 96);
    const auto u = trial_function(fx.m, bp, eps, delta, g);

    SUBCASE("supported inside the flattened delta-ball, nonnegative") {
        Eigen::VectorXd xp(1);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto x = g.node(i);
            CHECK(u.values[static_cast<Eigen::Index>(i)] >= 0.0);
            xp << x[0];
            const double rflat = std::hypot(x[0], x[1] - bp.f(xp));
            if (rflat > delta) CHECK(u.values[static_cast<Eigen::Index>(i)] == 0.0);
        }
        CHECK(u.values.maxCoeff() > 0.0);
    }
    SUBCASE("weighted norm approaches 1 as eps -> 0") {
        double prev_gap = 1e9;
        for (double eps_k : {0.4, 0.2, 0.1}) {
            const auto uk = trial_function(fx.m, bp, eps_k, delta, g);
            const double gap = std::abs(weighted_norm(uk, fx.p) - 1.0);
            CHECK(gap < prev_gap + 5e-3);
            prev_gap = gap;
        }
        CHECK(prev_gap < 0.08);
    }
    SUBCASE("unresolvable eps and oversized delta rejected") {
        CHECK_THROWS_AS(trial_function(fx.m, bp, 0.001, delta, g), numerical_error);
        CHECK_THROWS_AS(trial_function(fx.m, bp, 0.1, 2.0, g), std::invalid_argument);
    }
}

TEST_CASE("correction integrals positive, finite, stable") {
    SweepFixture fx;
    const auto ci = correction_integrals(fx.m, fx.p, 2.0);
    CHECK(ci.c1 > 0.0);
    CHECK(std::isfinite(ci.c1));
    CHECK(ci.c2 > 0.0);
    CHECK(std::isfinite(ci.c2));
    CHECK(ci.c1_error < 0.1 * ci.c1);
    CHECK(ci.c2_error < 0.1 * ci.c2);
    CHECK(ci.c1_tail_slope < -1.0);
    CHECK_THROWS_AS(correction_integrals(fx.m, fx.p, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(correction_integrals(fx.m, fx.p, 9.0), std::invalid_argument);
}

TEST_CASE("trial sweep: concave profile lowers the quotient at first order") {
    SweepFixture fx;
    const std::vector<double> eps_list{0.2, 0.1, 0.05};
    const double delta = 0.5;

    const auto concave = trial_quotient_sweep(
        fx.m, BoundaryProfile::power_law(2, -1.0, 2.0), fx.p, eps_list, delta);
    CHECK(concave.slope < 0.0);

    const auto flat =
        trial_quotient_sweep(fx.m, BoundaryProfile::flat(2), fx.p, eps_list, delta);
    CHECK(std::abs(flat.slope) < 0.25 * std::abs(concave.slope));
}
