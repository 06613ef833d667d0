#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "frachs/bessel.hpp"
#include "frachs/extension.hpp"
#include "frachs/math.hpp"
#include "test_helpers.hpp"

using namespace frachs;
namespace ft = frachs::testing;
constexpr double kPi = std::numbers::pi;

TEST_CASE("bessel K closed form at nu = 1/2") {
    for (double tau : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0}) {
        const double exact = std::sqrt(kPi / (2.0 * tau)) * std::exp(-tau);
        CHECK(bessel_k(0.5, tau) == doctest::Approx(exact).epsilon(1e-8));
    }
    CHECK(bessel_k(0.5, 1.0) == doctest::Approx(0.461068504447).epsilon(1e-9));
}

TEST_CASE("bessel K asymptotic regimes") {
    for (double s : {0.3, 0.5, 0.7}) {
        const double tau0 = 1e-3;
        const double small_law = gamma_fn(s) * std::pow(2.0, s - 1.0) * std::pow(tau0, -s);
        CHECK(bessel_k(s, tau0) / small_law == doctest::Approx(1.0).epsilon(0.01));
        const double tau1 = 25.0;
        const double large_law = std::sqrt(kPi / (2.0 * tau1)) * std::exp(-tau1);
        CHECK(bessel_k(s, tau1) / large_law == doctest::Approx(1.0).epsilon(0.01));
    }
}

TEST_CASE("bessel K regimes cross-validate at tau = 2") {
    for (double s : {0.25, 0.5, 0.75}) {
        const double below = bessel_k(s, 2.0);        // series route
        const double above = bessel_k(s, 2.0 + 1e-12);  // integral route
        CHECK(below == doctest::Approx(above).epsilon(1e-8));
    }
    CHECK_THROWS_AS(bessel_k(0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(bessel_k(0.5, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(bessel_k(1.5, 1.0), std::invalid_argument);
}

namespace {

struct ExtFixture {
    Grid g = Grid::interval(0.0, kPi, 200);
    SpectralDecomposition dec = eigenpairs(DirichletOperator(g), 200);
    FracParams p;
    ExtFixture(double s) : p(make_params(2, s, 0.5 * s)) {}
};

}  // namespace

TEST_CASE("extend: single mode separates") {
    ExtFixture f(0.5);
    GridFunction u;
    u.grid = f.g;
    u.values = f.dec.phis.col(0);
    const auto t = default_t_nodes(f.dec);
    const auto w = extend(f.dec, u, f.p, t);
    const double lam = f.dec.lambdas[0];
    // w(x, t_k) = d(t_k) phi_1(x) with the Fourier-Bessel coefficient
    for (std::size_t k = 0; k < t.size(); k += 17) {
        const double d = std::pow(t[k], f.p.s) * std::pow(2.0, 1.0 - f.p.s) / gamma_fn(f.p.s) *
                         std::pow(lam, 0.5 * f.p.s) * bessel_k(f.p.s, std::sqrt(lam) * t[k]);
        const Eigen::VectorXd expect = d * f.dec.phis.col(0);
        CHECK((w.values.col(static_cast<Eigen::Index>(k)) - expect).lpNorm<Eigen::Infinity>() <
              1e-10);
    }
}

TEST_CASE("extend: trace recovered as t -> 0 and zero maps to zero") {
    ExtFixture f(0.3);
    std::mt19937_64 rng(5);
    const auto u = ft::sample_bump(f.g, ft::random_bump(rng, 0.0, kPi));
    const auto t = default_t_nodes(f.dec);
    const auto w = extend(f.dec, u, f.p, t);
    GridFunction trace;
    trace.grid = f.g;
    trace.values = w.values.col(0);
    GridFunction diff;
    diff.grid = f.g;
    diff.values = trace.values - u.values;
    CHECK(diff.norm_l2() < 5e-3 * u.norm_l2());

    const auto w0 = extend(f.dec, GridFunction::zero(f.g), f.p, t);
    CHECK(w0.values.norm() == 0.0);
    CHECK_THROWS_AS(extend(f.dec, u, f.p, {}), std::invalid_argument);
}

TEST_CASE("extension field decays in t beyond the turning region") {
    ExtFixture f(0.6);
    std::mt19937_64 rng(8);
    const auto u = ft::sample_bump(f.g, ft::random_bump(rng, 0.0, kPi));
    const auto w = extend(f.dec, u, f.p, default_t_nodes(f.dec));
    const double t_turn = 1.0 / std::sqrt(f.dec.lambdas[0]);
    double prev = -1.0;
    for (std::size_t k = 0; k < w.t_nodes.size(); ++k) {
        if (w.t_nodes[k] < t_turn) continue;
        const double peak = w.values.col(static_cast<Eigen::Index>(k)).lpNorm<Eigen::Infinity>();
        if (prev >= 0.0) CHECK(peak <= prev * (1.0 + 1e-12));
        prev = peak;
    }
}

TEST_CASE("norm identity C_s E_s[w] = spectral form within 1%") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> cdist(-1.0, 1.0);
    for (double s : {0.3, 0.5, 0.7}) {
        ExtFixture f(s);
        GridFunction u;
        u.grid = f.g;
        u.values = Eigen::VectorXd::Zero(200);
        for (int j = 0; j < 5; ++j) u.values += cdist(rng) * f.dec.phis.col(j);
        const auto w = extend(f.dec, u, f.p, default_t_nodes(f.dec));
        const auto e = extension_energy(w);
        const double form = spectral_form(f.dec, u, s);
        CHECK(f.p.c_s * e.value == doctest::Approx(form).epsilon(0.01));
    }
}

TEST_CASE("single-mode energy and refinement error bound") {
    ExtFixture f(0.5);
    GridFunction u;
    u.grid = f.g;
    u.values = f.dec.phis.col(0);
    const auto t = default_t_nodes(f.dec);
    const auto w = extend(f.dec, u, f.p, t);
    const auto e = extension_energy(w);
    CHECK(f.p.c_s * e.value ==
          doctest::Approx(std::pow(f.dec.lambdas[0], f.p.s)).epsilon(0.01));

    // doubling the t-resolution moves the value by less than the reported error
    std::vector<double> t2;
    const double r2 = std::sqrt(1.15);
    for (double tv = t.front(); tv <= t.back(); tv *= r2) t2.push_back(tv);
    const auto w2 = extend(f.dec, u, f.p, t2);
    const auto e2 = extension_energy(w2);
    CHECK(std::abs(e2.value - e.value) < e.richardson_error);

    const auto wz = extend(f.dec, GridFunction::zero(f.g), f.p, t);
    CHECK(extension_energy(wz).value == 0.0);
}

TEST_CASE("admissible competitors carry at least the minimal energy") {
    ExtFixture f(0.5);
    std::mt19937_64 rng(23);
    const auto u = ft::sample_bump(f.g, ft::random_bump(rng, 0.0, kPi));
    const auto t = default_t_nodes(f.dec);
    const auto w = extend(f.dec, u, f.p, t);
    const double e_min = extension_energy(w).value;

    std::uniform_real_distribution<double> noise(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        ExtensionField pert = w;
        // compactly supported interior perturbation in t, trace untouched
        for (Eigen::Index k = 0; k < pert.values.cols(); ++k) {
            const double tv = pert.t_nodes[static_cast<std::size_t>(k)];
            const double window = cutoff(std::abs(tv - 1.0), 0.9);
            if (window == 0.0) continue;
            for (Eigen::Index i = 0; i < pert.values.rows(); ++i)
                pert.values(i, k) += 0.3 * window * noise(rng);
        }
        CHECK(extension_energy(pert).value >= e_min);
    }
}

TEST_CASE("mode decoupling of the energy") {
    ExtFixture f(0.4);
    const auto t = default_t_nodes(f.dec);
    auto single = [&](int j) {
        GridFunction u;
        u.grid = f.g;
        u.values = f.dec.phis.col(j);
        return extension_energy(extend(f.dec, u, f.p, t)).value;
    };
    GridFunction both;
    both.grid = f.g;
    both.values = f.dec.phis.col(0) + f.dec.phis.col(2);
    const double e_both = extension_energy(extend(f.dec, both, f.p, t)).value;
    CHECK(e_both == doctest::Approx(single(0) + single(2)).epsilon(1e-3));
}

TEST_CASE("conormal derivative") {
    ExtFixture f(0.5);
    const auto t = default_t_nodes(f.dec);

    SUBCASE("eigenfunction reproduces with eigenvalue power") {
        GridFunction u;
        u.grid = f.g;
        u.values = f.dec.phis.col(0);
        const auto w = extend(f.dec, u, f.p, t);
        const auto cd = conormal_derivative(w, f.p);
        const Eigen::VectorXd expect = std::pow(f.dec.lambdas[0], f.p.s) * f.dec.phis.col(0);
        CHECK((cd.values - expect).norm() / expect.norm() < 0.01);
    }
    SUBCASE("zero and too-few-node errors") {
        const auto w0 = extend(f.dec, GridFunction::zero(f.g), f.p, t);
        CHECK(conormal_derivative(w0, f.p).values.norm() == 0.0);
        const auto wshort = extend(f.dec, GridFunction::zero(f.g), f.p, {0.1, 0.2});
        CHECK_THROWS_AS(conormal_derivative(wshort, f.p), std::invalid_argument);
    }
    SUBCASE("pairing with u equals the spectral form within 1%") {
        std::mt19937_64 rng(31);
        const auto u = ft::sample_bump(f.g, ft::random_bump(rng, 0.0, kPi));
        const auto w = extend(f.dec, u, f.p, t);
        const auto cd = conormal_derivative(w, f.p);
        CHECK(cd.dot(u) == doctest::Approx(spectral_form(f.dec, u, f.p.s)).epsilon(0.01));
    }
    SUBCASE("richardson exponent sensitivity: 2s vs 2-2s") {
        std::mt19937_64 rng(37);
        for (double s : {0.3, 0.7}) {
            ExtFixture fs(s);
            const auto ts = default_t_nodes(fs.dec);
            const auto u = ft::sample_bump(fs.g, ft::random_bump(rng, 0.0, kPi));
            const auto w = extend(fs.dec, u, fs.p, ts);
            const auto a = conormal_derivative(w, fs.p, 2.0 * s);
            const auto b = conormal_derivative(w, fs.p, 2.0 - 2.0 * s);
            const double form = spectral_form(fs.dec, u, s);
            CHECK(a.dot(u) == doctest::Approx(form).epsilon(0.01));
            CHECK(b.dot(u) == doctest::Approx(form).epsilon(0.01));
        }
    }
}
