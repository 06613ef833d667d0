#include "frachs/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "frachs/math.hpp"

namespace frachs {

// Dense symmetric eigen-decomposition of the 1D Dirichlet Laplacian on one axis.
// Returns (lambdas ascending, vectors as columns, l2-orthonormal).
std::pair<Eigen::VectorXd, Eigen::MatrixXd> axis_dirichlet_eigs(int m, double h) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    const double d = 2.0 / (h * h), off = -1.0 / (h * h);
    for (int i = 0; i < m; ++i) {
        a(i, i) = d;
        if (i + 1 < m) {
            a(i, i + 1) = off;
            a(i + 1, i) = off;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigenpairs: axis eigensolver failed to converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

DirichletOperator::DirichletOperator(const Grid& grid) : grid_(grid) {}

Eigen::VectorXd DirichletOperator::apply(const Eigen::VectorXd& u) const {
    const auto n = static_cast<Eigen::Index>(grid_.size());
    if (u.size() != n) throw std::invalid_argument("DirichletOperator: size mismatch");
    Eigen::VectorXd out(n);
    if (grid_.dim() == 1) {
        const double inv = 1.0 / (grid_.h(0) * grid_.h(0));
        for (Eigen::Index i = 0; i < n; ++i) {
            const double left = i > 0 ? u[i - 1] : 0.0;
            const double right = i + 1 < n ? u[i + 1] : 0.0;
            out[i] = (2.0 * u[i] - left - right) * inv;
        }
    } else {
        const int mx = grid_.res(0), my = grid_.res(1);
        const double ix = 1.0 / (grid_.h(0) * grid_.h(0));
        const double iy = 1.0 / (grid_.h(1) * grid_.h(1));
        auto at = [&](int i, int j) -> double {
            if (i < 0 || i >= mx || j < 0 || j >= my) return 0.0;
            return u[i + static_cast<Eigen::Index>(mx) * j];
        };
        for (int j = 0; j < my; ++j)
            for (int i = 0; i < mx; ++i)
                out[i + static_cast<Eigen::Index>(mx) * j] =
                    (2.0 * at(i, j) - at(i - 1, j) - at(i + 1, j)) * ix +
                    (2.0 * at(i, j) - at(i, j - 1) - at(i, j + 1)) * iy;
    }
    return out;
}

double DirichletOperator::stencil_energy(const GridFunction& u) const {
    if (!grid_.same_layout(u.grid)) throw std::invalid_argument("stencil_energy: grid mismatch");
    const double cw = grid_.cell_weight();
    double e = 0.0;
    if (grid_.dim() == 1) {
        const int m = grid_.res(0);
        const double inv2 = 1.0 / (grid_.h(0) * grid_.h(0));
        for (int i = 0; i <= m; ++i) {
            const double a = i > 0 ? u.values[i - 1] : 0.0;
            const double b = i < m ? u.values[i] : 0.0;
            e += (b - a) * (b - a) * inv2;
        }
    } else {
        const int mx = grid_.res(0), my = grid_.res(1);
        auto at = [&](int i, int j) -> double {
            if (i < 0 || i >= mx || j < 0 || j >= my) return 0.0;
            return u.values[i + static_cast<Eigen::Index>(mx) * j];
        };
        const double ix2 = 1.0 / (grid_.h(0) * grid_.h(0));
        const double iy2 = 1.0 / (grid_.h(1) * grid_.h(1));
        for (int j = 0; j < my; ++j)
            for (int i = 0; i <= mx; ++i) e += ix2 * std::pow(at(i, j) - at(i - 1, j), 2);
        for (int j = 0; j <= my; ++j)
            for (int i = 0; i < mx; ++i) e += iy2 * std::pow(at(i, j) - at(i, j - 1), 2);
    }
    return cw * e;
}

double DirichletOperator::trace() const {
    double diag = 2.0 / (grid_.h(0) * grid_.h(0));
    if (grid_.dim() == 2) diag += 2.0 / (grid_.h(1) * grid_.h(1));
    return diag * static_cast<double>(grid_.size());
}

SpectralDecomposition eigenpairs(const DirichletOperator& op, int k) {
    const Grid& g = op.grid();
    const auto n = static_cast<int>(g.size());
    if (k < 1 || k > n) throw std::invalid_argument("eigenpairs: k out of range");

    SpectralDecomposition dec;
    dec.grid = g;
    const double scale = 1.0 / std::sqrt(g.cell_weight());  // l2 -> grid-L2 orthonormal

    if (g.dim() == 1) {
        auto [lam, vec] = axis_dirichlet_eigs(g.res(0), g.h(0));
        dec.lambdas = lam.head(k);
        dec.phis = vec.leftCols(k) * scale;
    } else {
        auto [lx, vx] = axis_dirichlet_eigs(g.res(0), g.h(0));
        auto [ly, vy] = axis_dirichlet_eigs(g.res(1), g.h(1));
        const int mx = g.res(0), my = g.res(1);
        std::vector<int> order(static_cast<size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        auto lam_of = [&](int idx) { return lx[idx % mx] + ly[idx / mx]; };
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return lam_of(a) < lam_of(b); });
        dec.lambdas.resize(k);
        dec.phis.resize(n, k);
        for (int c = 0; c < k; ++c) {
            const int a = order[c] % mx, b = order[c] / mx;
            dec.lambdas[c] = lam_of(order[c]);
            for (int j = 0; j < my; ++j)
                for (int i = 0; i < mx; ++i)
                    dec.phis(i + static_cast<Eigen::Index>(mx) * j, c) = vx(i, a) * vy(j, b) * scale;
        }
    }
    dec.count = k;
    return dec;
}

Eigen::VectorXd SpectralDecomposition::coefficients(const GridFunction& u) const {
    if (!grid.same_layout(u.grid)) throw std::invalid_argument("spectral: grid mismatch");
    return grid.cell_weight() * (phis.transpose() * u.values);
}

double spectral_form(const SpectralDecomposition& dec, const GridFunction& u, double s) {
    const Eigen::VectorXd c = dec.coefficients(u);
    double acc = 0.0;
    for (Eigen::Index j = 0; j < c.size(); ++j) acc += std::pow(dec.lambdas[j], s) * c[j] * c[j];
    return acc;
}

double riesz_form(const GridFunction& u, double s, int torus_factor) {
    if (torus_factor < 2)
        throw std::invalid_argument("riesz_form: torus_factor must be >= 2 (aliasing control)");
    const Grid& g = u.grid;
    const double two_pi = 2.0 * std::numbers::pi;

    if (g.dim() == 1) {
        const int m = g.res(0);
        const int big = torus_factor * (m + 1);
        const double length = torus_factor * (g.hi(0) - g.lo(0));
        std::vector<double> in(static_cast<size_t>(big), 0.0);
        for (int i = 0; i < m; ++i) in[static_cast<size_t>(i + 1)] = u.values[i];
        std::vector<std::complex<double>> out(static_cast<size_t>(big / 2 + 1));
        fftw_plan plan = fftw_plan_dft_r2c_1d(
            big, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
        double acc = 0.0;
        for (int kk = 0; kk <= big / 2; ++kk) {
            const double xi = two_pi * kk / length;
            const double c2 = std::norm(out[static_cast<size_t>(kk)]) / (double(big) * big);
            const double mult = (kk == 0 || 2 * kk == big) ? 1.0 : 2.0;  // conjugate pair
            acc += mult * std::pow(xi * xi, s) * c2;
        }
        return length * acc;
    }

    const int mx = g.res(0), my = g.res(1);
    const int bx = torus_factor * (mx + 1), by = torus_factor * (my + 1);
    const double lx = torus_factor * (g.hi(0) - g.lo(0));
    const double ly = torus_factor * (g.hi(1) - g.lo(1));
    std::vector<double> in(static_cast<size_t>(bx) * by, 0.0);
    for (int j = 0; j < my; ++j)
        for (int i = 0; i < mx; ++i)
            in[static_cast<size_t>(j + 1) * bx + (i + 1)] =
                u.values[i + static_cast<Eigen::Index>(mx) * j];
    // fftw r2c in row-major with dims (by, bx): last dim halved
    std::vector<std::complex<double>> out(static_cast<size_t>(by) * (bx / 2 + 1));
    fftw_plan plan = fftw_plan_dft_r2c_2d(by, bx, in.data(),
                                          reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    const double norm2 = 1.0 / (static_cast<double>(bx) * by);
    double acc = 0.0;
    for (int kj = 0; kj < by; ++kj) {
        const int kjs = kj <= by / 2 ? kj : kj - by;
        for (int ki = 0; ki <= bx / 2; ++ki) {
            const double xix = two_pi * ki / lx;
            const double xiy = two_pi * kjs / ly;
            const double c2 = std::norm(out[static_cast<size_t>(kj) * (bx / 2 + 1) + ki]) * norm2 * norm2;
            const double mult = (ki == 0 || 2 * ki == bx) ? 1.0 : 2.0;
            acc += mult * std::pow(xix * xix + xiy * xiy, s) * c2;
        }
    }
    return lx * ly * acc;
}

double weighted_norm(const GridFunction& u, const FracParams& p) {
    const Grid& g = u.grid;
    const double a = p.weight_exponent();
    const double clamp = g.radius_clamp();
    const double cw = g.cell_weight();
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double r = std::max(g.node_radius(i), clamp);
        acc += cw * std::pow(r, a) *
               std::pow(std::abs(u.values[static_cast<Eigen::Index>(i)]), p.two_star_sigma);
    }
    return std::pow(acc, 1.0 / p.two_star_sigma);
}

double rayleigh_quotient(const SpectralDecomposition& dec, const GridFunction& u,
                         const FracParams& p) {
    if (u.values.lpNorm<Eigen::Infinity>() == 0.0)
        throw std::invalid_argument("rayleigh_quotient: u must be nonzero");
    const double denom = weighted_norm(u, p);
    return spectral_form(dec, u, p.s) / (denom * denom);
}

}  // namespace frachs
