#include "frachs/halfspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "frachs/bessel.hpp"
#include "frachs/math.hpp"

namespace frachs {

namespace {

constexpr double kPi = std::numbers::pi;

struct KernelGeometry {
    double rho2 = 0.0;   // |y - xi|^2 + z^2
    double rbar2 = 0.0;  // rho2 + 4 y_n xi_n (image distance)
    double yn = 0.0, xin = 0.0, z = 0.0;
};

KernelGeometry kernel_geometry(const KernelPoint& pt, const FracParams& p, bool drop_z) {
    if (pt.y.size() != p.n || pt.xi.size() != p.n)
        throw std::invalid_argument("green_kernel: point dimension mismatch");
    KernelGeometry kg;
    kg.yn = pt.y[p.n - 1];
    kg.xin = pt.xi[p.n - 1];
    kg.z = drop_z ? 0.0 : pt.z;
    if (kg.yn <= 0.0 || kg.xin <= 0.0)
        throw std::invalid_argument("green_kernel: y_n and xi_n must be positive");
    if (kg.z < 0.0) throw std::invalid_argument("green_kernel: z must be nonnegative");
    kg.rho2 = (pt.y - pt.xi).squaredNorm() + kg.z * kg.z;
    kg.rbar2 = kg.rho2 + 4.0 * kg.yn * kg.xin;
    if (kg.rho2 == 0.0) throw std::invalid_argument("green_kernel: coincident singular point");
    return kg;
}

}  // namespace

double green_kernel(KernelKind kind, const KernelPoint& pt, const FracParams& p,
                    double normalization) {
    const bool trace = kind == KernelKind::Trace;
    const auto kg = kernel_geometry(pt, p, trace);
    switch (kind) {
        case KernelKind::SourceData:
        case KernelKind::Trace: {
            const double e = 0.5 * (p.n - 2.0 * p.s);
            return normalization * (std::pow(kg.rho2, -e) - std::pow(kg.rbar2, -e));
        }
        case KernelKind::BoundaryData: {
            const double e = 0.5 * (p.n + 2.0 * p.s);
            return normalization * std::pow(kg.z, 2.0 * p.s) *
                   (std::pow(kg.rho2, -e) - std::pow(kg.rbar2, -e));
        }
    }
    throw std::invalid_argument("green_kernel: unknown kind");
}

Eigen::VectorXd green_kernel_gradient(const KernelPoint& pt, const FracParams& p,
                                      double normalization) {
    const auto kg = kernel_geometry(pt, p, false);
    const double m = p.n - 2.0 * p.s;
    const double a = std::pow(kg.rho2, -0.5 * m - 1.0);
    const double b = std::pow(kg.rbar2, -0.5 * m - 1.0);
    Eigen::VectorXd grad(p.n + 1);
    for (int i = 0; i < p.n - 1; ++i) grad[i] = -m * (pt.y[i] - pt.xi[i]) * (a - b);
    grad[p.n - 1] = -m * ((kg.yn - kg.xin) * a - (kg.yn + kg.xin) * b);
    grad[p.n] = -m * kg.z * (a - b);
    return normalization * grad;
}

double c_hat_closed_form(const FracParams& p) {
    return gamma_fn(0.5 * (p.n + 2.0 * p.s)) / (std::pow(kPi, 0.5 * p.n) * gamma_fn(p.s));
}

double c_tilde_riesz_reference(const FracParams& p) {
    return gamma_fn(0.5 * p.n - p.s) /
           (std::pow(4.0, p.s) * std::pow(kPi, 0.5 * p.n) * gamma_fn(p.s));
}

namespace {

// I_0(z) by power series; arguments stay below ~40 in the calibration.
double bessel_i0(double z) {
    const double q = 0.25 * z * z;
    double term = 1.0, acc = 1.0;
    for (int k = 1; k < 300; ++k) {
        term *= q / (static_cast<double>(k) * k);
        acc += term;
        if (term < 1e-18 * acc) break;
    }
    return acc;
}

// Spherical average of the Gaussian exp(-|xi|^2/2) over the sphere of radius r
// centered at distance rho from the origin.
double gaussian_sphere_average(int n, double rho, double r) {
    const double pre = std::exp(-0.5 * (rho * rho + r * r));
    const double a = rho * r;
    if (n == 2) return pre * bessel_i0(a);
    if (n == 3) return a < 1e-12 ? pre : pre * std::sinh(a) / a;
    throw std::invalid_argument("kernel_normalizations: calibration supports n = 2, 3");
}

// int_0^inf r^{n-1} (r^2 + t^2)^{(2s-n-2)/2} avg(r) dr on graded panels.
double radial_kernel_integral(int n, double s, double rho, double t, int quality) {
    static const double gl_x[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                   0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                   0.9445750230732326, 0.9894009349916499};
    static const double gl_w[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                   0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                   0.0622535239386479, 0.0271524594117541};
    std::vector<double> brk{0.0, 0.25 * t, 0.5 * t, t};
    for (double b = 2.0 * t; b < 15.0; b *= 2.0) brk.push_back(b);
    brk.push_back(15.0);
    const int rep = quality;  // subdivide each panel
    const double e = 0.5 * (2.0 * s - n - 2.0);
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < brk.size(); ++k) {
        const double w = (brk[k + 1] - brk[k]) / rep;
        for (int sub = 0; sub < rep; ++sub) {
            const double lo = brk[k] + sub * w, mid = lo + 0.5 * w, half = 0.5 * w;
            for (int q = 0; q < 8; ++q) {
                for (double sign : {-1.0, 1.0}) {
                    const double r = mid + sign * half * gl_x[q];
                    acc += half * gl_w[q] * std::pow(r, n - 1) *
                           std::pow(r * r + t * t, e) * gaussian_sphere_average(n, rho, r);
                }
            }
        }
    }
    return acc;
}

}  // namespace

KernelNormalizations kernel_normalizations(const FracParams& p, int quality) {
    if (quality < 1) throw std::invalid_argument("kernel_normalizations: quality >= 1");
    KernelNormalizations out;
    out.c_hat = c_hat_closed_form(p);

    // Calibrate c_tilde: with a unit constant, the conormal derivative of the
    // kernel-smoothed Gaussian returns h / c_tilde; least squares over a
    // radial sample recovers the constant.
    const double s = p.s;
    const int n = p.n;
    const double t1 = 0.01 / quality, t2 = 0.02 / quality;
    const double theta = 2.0 - 2.0 * s;  // leading correction exponent in t
    const int samples = 8 + 4 * quality;

    std::vector<double> response(samples), target(samples);
    for (int i = 0; i < samples; ++i) {
        const double rho = 2.0 * i / (samples - 1);
        auto g_of_t = [&](double t) {
            return (2.0 * s - n) * std::pow(t, 2.0 - 2.0 * s) * sphere_area(n - 1) *
                   radial_kernel_integral(n, s, rho, t, quality);
        };
        const double g1 = g_of_t(t1), g2 = g_of_t(t2);
        const double p1 = std::pow(t1, theta), p2 = std::pow(t2, theta);
        const double limit = (p2 * g1 - p1 * g2) / (p2 - p1);
        response[i] = -p.c_s * limit;
        target[i] = std::exp(-0.5 * rho * rho);
    }
    double num = 0.0, den = 0.0;
    for (int i = 0; i < samples; ++i) {
        num += response[i] * target[i];
        den += response[i] * response[i];
    }
    out.c_tilde = num / den;
    double misfit = 0.0, scale = 0.0;
    for (int i = 0; i < samples; ++i) {
        misfit += std::pow(out.c_tilde * response[i] - target[i], 2);
        scale += target[i] * target[i];
    }
    out.calibration_residual = std::sqrt(misfit / scale);
    if (out.calibration_residual > 1e-4)
        throw numerical_error("kernel_normalizations: calibration residual above 1e-4");
    return out;
}

BoundMargin kernel_bound_margin(const KernelPoint& pt, double b_frak, const FracParams& p,
                                double normalization) {
    if (b_frak < 0.0 || b_frak > 1.0)
        throw std::invalid_argument("kernel_bound_margin: b_frak must lie in [0,1]");
    const auto kg = kernel_geometry(pt, p, false);
    BoundMargin bm;
    bm.lhs = green_kernel(KernelKind::SourceData, pt, p, normalization);
    bm.rhs_shape = std::pow(kg.yn, b_frak) * std::pow(kg.xin, b_frak) *
                   std::pow(kg.rho2, -0.5 * (p.n - 2.0 * p.s + 2.0 * b_frak));
    return bm;
}

BoundMargin kernel_gradient_margin(const KernelPoint& pt, const FracParams& p,
                                   double normalization) {
    const auto kg = kernel_geometry(pt, p, false);
    BoundMargin bm;
    bm.lhs = green_kernel_gradient(pt, p, normalization).norm();
    const double rho = std::sqrt(kg.rho2);
    bm.rhs_shape = std::pow(kg.rho2, -0.5 * (p.n - 2.0 * p.s + 1.0)) *
                   std::min(1.0, kg.yn * kg.xin / kg.rho2 + kg.xin / rho);
    return bm;
}

FieldClosure kelvin(FieldClosure w, const FracParams& p) {
    const double e = 2.0 * p.s - p.n;
    return [w = std::move(w), e](const Eigen::VectorXd& x) -> double {
        const double r2 = x.squaredNorm();
        if (r2 == 0.0) throw std::invalid_argument("kelvin: evaluation at the origin");
        return std::pow(r2, 0.5 * e) * w(x / r2);
    };
}

double ls_residual(const FieldClosure& w, const Eigen::VectorXd& X, double s, double h) {
    const auto d = static_cast<int>(X.size());
    const double t = X[d - 1];
    if (t - 0.5 * h <= 0.0)
        throw std::invalid_argument("ls_residual: stencil reaches the degenerate axis");
    const double wc = w(X);
    double acc = 0.0;
    const double tw = std::pow(t, 1.0 - 2.0 * s);
    for (int a = 0; a + 1 < d; ++a) {
        Eigen::VectorXd xp = X, xm = X;
        xp[a] += h;
        xm[a] -= h;
        acc += tw * (w(xp) - 2.0 * wc + w(xm)) / (h * h);
    }
    Eigen::VectorXd tp = X, tm = X;
    tp[d - 1] += h;
    tm[d - 1] -= h;
    const double wp = std::pow(t + 0.5 * h, 1.0 - 2.0 * s);
    const double wm = std::pow(t - 0.5 * h, 1.0 - 2.0 * s);
    acc += (wp * (w(tp) - wc) - wm * (wc - w(tm))) / (h * h);
    return -acc;
}

// ---------------------------------------------------------------------------
// Reduced operator and minimizer
// ---------------------------------------------------------------------------

ReducedGrid ReducedGrid::make(int n, double R, int res, double gauge_radius) {
    if (n < 2) throw std::invalid_argument("ReducedGrid: n >= 2 required");
    if (res < 8) throw std::invalid_argument("ReducedGrid: resolution too small");
    if (R <= 0.0) throw std::invalid_argument("ReducedGrid: R must be positive");
    if (gauge_radius < 0.0)
        throw std::invalid_argument("ReducedGrid: gauge radius must be nonnegative");
    ReducedGrid g;
    g.n = n;
    g.R = R;
    g.gauge_radius = gauge_radius;
    g.m_tau = g.m_yn = res;
    g.h_tau = R / res;
    g.h_yn = R / (res + 1);
    g.tau.resize(res);
    g.yn.resize(res);
    for (int i = 0; i < res; ++i) g.tau[i] = (i + 0.5) * g.h_tau;
    for (int j = 0; j < res; ++j) g.yn[j] = (j + 1) * g.h_yn;
    g.ang = sphere_area(n - 2);
    return g;
}

double ReducedGrid::tau_weight(int i) const {
    return ang * std::pow(tau[i], n - 2) * h_tau;
}

double ReducedGrid::node_radius(int i, int j) const { return std::hypot(tau[i], yn[j]); }

double ReducedGrid::clamped_radius(int i, int j) const {
    return std::max(node_radius(i, j), gauge_radius);
}

ReducedOperator::ReducedOperator(const ReducedGrid& g) : g_(g) {
    const int m = g.m_tau;
    // tau direction: conservative form, symmetrized by D = diag(tau^{(n-2)/2})
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
    const double h2 = g.h_tau * g.h_tau;
    auto face = [&](int i) { return std::pow((i + 1) * g.h_tau, g.n - 2); };  // tau_{i+1/2}^{n-2}
    auto cell = [&](int i) { return std::pow(g.tau[i], g.n - 2); };
    for (int i = 0; i < m; ++i) {
        double diag = 0.0;
        if (i > 0) diag += face(i - 1);
        if (i + 1 < m) {
            diag += face(i);
            const double off = -face(i) / (h2 * std::sqrt(cell(i) * cell(i + 1)));
            b(i, i + 1) = off;
            b(i + 1, i) = off;
        } else {
            diag += 2.0 * std::pow(g.R, g.n - 2);  // Dirichlet at the outer face
        }
        b(i, i) = diag / (h2 * cell(i));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> stau(b);
    if (stau.info() != Eigen::Success)
        throw numerical_error("ReducedOperator: tau eigensolver failed");
    ltau_ = stau.eigenvalues();
    ptau_.resize(m, m);
    for (int c = 0; c < m; ++c)
        for (int i = 0; i < m; ++i)
            ptau_(i, c) = stau.eigenvectors()(i, c) / std::sqrt(cell(i) * g.ang * g.h_tau);

    // y_n direction: vertex-centered Dirichlet Laplacian
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    const double hy2 = g.h_yn * g.h_yn;
    for (int j = 0; j < m; ++j) {
        a(j, j) = 2.0 / hy2;
        if (j + 1 < m) {
            a(j, j + 1) = -1.0 / hy2;
            a(j + 1, j) = -1.0 / hy2;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> syn(a);
    if (syn.info() != Eigen::Success)
        throw numerical_error("ReducedOperator: y_n eigensolver failed");
    lyn_ = syn.eigenvalues();
    pyn_ = syn.eigenvectors() / std::sqrt(g.h_yn);

    ptau_w_.resize(m, m);
    for (int i = 0; i < m; ++i) ptau_w_.row(i) = g.tau_weight(i) * ptau_.row(i);
    pyn_w_ = g.h_yn * pyn_;
}

Eigen::MatrixXd ReducedOperator::project(const Eigen::MatrixXd& u) const {
    return ptau_w_.transpose() * u * pyn_w_;
}

Eigen::MatrixXd ReducedOperator::synthesize(const Eigen::MatrixXd& coef) const {
    return ptau_ * coef * pyn_.transpose();
}

Eigen::MatrixXd ReducedOperator::apply_power(const Eigen::MatrixXd& u, double s) const {
    Eigen::MatrixXd c = project(u);
    for (Eigen::Index a = 0; a < c.rows(); ++a)
        for (Eigen::Index b = 0; b < c.cols(); ++b)
            c(a, b) *= std::pow(ltau_[a] + lyn_[b], s);
    return synthesize(c);
}

double ReducedOperator::form(const Eigen::MatrixXd& u, double s) const {
    const Eigen::MatrixXd c = project(u);
    double acc = 0.0;
    for (Eigen::Index a = 0; a < c.rows(); ++a)
        for (Eigen::Index b = 0; b < c.cols(); ++b)
            acc += std::pow(ltau_[a] + lyn_[b], s) * c(a, b) * c(a, b);
    return acc;
}

double reduced_weighted_norm(const ReducedGrid& g, const Eigen::MatrixXd& u,
                             const FracParams& p) {
    const double a = p.weight_exponent();
    double acc = 0.0;
    for (int i = 0; i < g.m_tau; ++i) {
        const double wt = g.tau_weight(i) * g.h_yn;
        for (int j = 0; j < g.m_yn; ++j)
            acc += wt * std::pow(g.clamped_radius(i, j), a) *
                   std::pow(std::abs(u(i, j)), p.two_star_sigma);
    }
    return std::pow(acc, 1.0 / p.two_star_sigma);
}

namespace {

double shell_mass(const ReducedGrid& g, const Eigen::MatrixXd& u, const FracParams& p,
                  double inner_radius) {
    const double a = p.weight_exponent();
    double acc = 0.0;
    for (int i = 0; i < g.m_tau; ++i)
        for (int j = 0; j < g.m_yn; ++j) {
            const double r = g.node_radius(i, j);
            if (r <= inner_radius) continue;
            acc += g.tau_weight(i) * g.h_yn * std::pow(r, a) *
                   std::pow(std::abs(u(i, j)), p.two_star_sigma);
        }
    return acc;
}

}  // namespace

ReducedMinimizer halfspace_minimizer(const FracParams& p, double R, int res, double tol,
                                     int max_iter, double gauge_radius) {
    if (tol <= 0.0) throw std::invalid_argument("halfspace_minimizer: tol must be positive");
    const ReducedGrid g = ReducedGrid::make(p.n, R, res, gauge_radius);
    const ReducedOperator op(g);

    // singular weight |y|^{(sigma-s) 2*} per node
    Eigen::MatrixXd wgt(g.m_tau, g.m_yn);
    for (int i = 0; i < g.m_tau; ++i)
        for (int j = 0; j < g.m_yn; ++j)
            wgt(i, j) = std::pow(g.clamped_radius(i, j), p.weight_exponent());

    // initial profile with the known linear vanishing in y_n
    Eigen::MatrixXd u(g.m_tau, g.m_yn);
    for (int i = 0; i < g.m_tau; ++i)
        for (int j = 0; j < g.m_yn; ++j)
            u(i, j) = g.yn[j] * std::exp(-(g.tau[i] * g.tau[i] + g.yn[j] * g.yn[j]));
    u /= reduced_weighted_norm(g, u, p);

    ReducedMinimizer out;
    out.params = p;
    out.grid = g;
    double q = op.form(u, p.s);
    out.history.push_back(q);

    const double pexp = p.two_star_sigma;

    // multiplier-fitted Euler-Lagrange residual (the equation holds up to a
    // constant under the unit-norm normalization)
    auto residual_of = [&](const Eigen::MatrixXd& v) {
        const Eigen::MatrixXd asu = op.apply_power(v, p.s);
        const Eigen::MatrixXd gterm = wgt.array() * v.array().max(0.0).pow(pexp - 1.0);
        double ip = 0.0, gg = 0.0, aa = 0.0;
        for (int i = 0; i < g.m_tau; ++i) {
            const double wt = g.tau_weight(i) * g.h_yn;
            for (int j = 0; j < g.m_yn; ++j) {
                ip += wt * asu(i, j) * gterm(i, j);
                gg += wt * gterm(i, j) * gterm(i, j);
                aa += wt * asu(i, j) * asu(i, j);
            }
        }
        const double mu = ip / gg;
        double rr = 0.0;
        for (int i = 0; i < g.m_tau; ++i) {
            const double wt = g.tau_weight(i) * g.h_yn;
            for (int j = 0; j < g.m_yn; ++j)
                rr += wt * std::pow(asu(i, j) - mu * gterm(i, j), 2);
        }
        return std::sqrt(rr / aa);
    };

    for (int it = 0; it < max_iter; ++it) {
        const Eigen::MatrixXd rhs =
            wgt.array() * u.array().max(0.0).pow(pexp - 1.0);
        Eigen::MatrixXd v = op.apply_power(rhs, -p.s);
        for (Eigen::Index i = 0; i < v.size(); ++i)
            if (v.data()[i] < 0.0) {
                v.data()[i] = 0.0;
                ++out.positivity_projections;
            }
        v /= reduced_weighted_norm(g, v, p);
        const double q_new = op.form(v, p.s);
        if (q_new > q * (1.0 + 1e-11))
            throw iteration_error("halfspace_minimizer: non-monotone quotient", out.history);
        u = v;
        out.history.push_back(q_new);
        // value stationarity alone stops too early; require the iterate to be
        // stationary as well (the residual keeps contracting geometrically)
        bool done = false;
        if ((q - q_new) < tol * q_new) {
            out.el_residual = residual_of(u);
            done = out.el_residual < 10.0 * tol;
        }
        q = q_new;
        out.iterations = it + 1;
        if (done) break;
    }

    out.values = u;
    out.quotient = q;
    if (out.el_residual == 0.0 || out.el_residual >= 10.0 * tol)
        out.el_residual = residual_of(u);

    out.boundary_mass = shell_mass(g, u, p, 0.8 * R);
    if (out.boundary_mass >= 1e-3)
        throw numerical_error(
            "halfspace_minimizer: insufficient truncation radius (boundary mass >= 1e-3)");
    return out;
}

ReducedExtension reduced_extend(const ReducedOperator& op, const Eigen::MatrixXd& u,
                                const FracParams& p) {
    const ReducedGrid& g = op.grid();
    ReducedExtension ext;
    ext.grid = g;
    ext.s = p.s;
    const double lam_max = op.lambda_max(), lam_min = op.lambda_min();
    ext.z_nodes = geometric_nodes(1e-4 / std::sqrt(lam_max),
                                  -std::log(1e-14) / std::sqrt(lam_min), 1.15);

    const Eigen::MatrixXd coef = op.project(u);
    const int m = g.m_tau;
    const double pref = std::pow(2.0, 1.0 - p.s) / gamma_fn(p.s);
    ext.w.reserve(ext.z_nodes.size());
    for (double z : ext.z_nodes) {
        Eigen::MatrixXd d(m, m);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                const double lam = op.tau_lambdas()[a] + op.yn_lambdas()[b];
                const double arg = std::sqrt(lam) * z;
                d(a, b) = arg > 40.0 ? 0.0
                                     : coef(a, b) * std::pow(z, p.s) * pref *
                                           std::pow(lam, 0.5 * p.s) * bessel_k(p.s, arg);
            }
        ext.w.push_back(op.synthesize(d));
    }
    return ext;
}

// central differences with reflection at tau = 0 and Dirichlet rows elsewhere
Eigen::MatrixXd reduced_d_tau(const ReducedGrid& g, const Eigen::MatrixXd& f) {
    Eigen::MatrixXd out(g.m_tau, g.m_yn);
    for (int j = 0; j < g.m_yn; ++j)
        for (int i = 0; i < g.m_tau; ++i) {
            const double fm = i > 0 ? f(i - 1, j) : f(0, j);  // even reflection
            const double fp = i + 1 < g.m_tau ? f(i + 1, j) : 0.0;
            out(i, j) = (fp - fm) / (2.0 * g.h_tau);
        }
    return out;
}

Eigen::MatrixXd reduced_d_yn(const ReducedGrid& g, const Eigen::MatrixXd& f) {
    Eigen::MatrixXd out(g.m_tau, g.m_yn);
    for (int j = 0; j < g.m_yn; ++j)
        for (int i = 0; i < g.m_tau; ++i) {
            const double fm = j > 0 ? f(i, j - 1) : 0.0;  // Dirichlet at y_n = 0
            const double fp = j + 1 < g.m_yn ? f(i, j + 1) : 0.0;
            out(i, j) = (fp - fm) / (2.0 * g.h_yn);
        }
    return out;
}

Eigen::MatrixXd v_profile(const ReducedExtension& ext) {
    const ReducedGrid& g = ext.grid;
    const double a = 1.0 - 2.0 * ext.s;
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(g.m_tau, g.m_yn);
    std::vector<Eigen::MatrixXd> grads(ext.w.size());
    for (std::size_t k = 0; k < ext.w.size(); ++k) {
        const Eigen::MatrixXd gt = reduced_d_tau(g, ext.w[k]);
        const Eigen::MatrixXd gy = reduced_d_yn(g, ext.w[k]);
        grads[k] = gt.array().square() + gy.array().square();
    }
    for (std::size_t k = 0; k + 1 < ext.w.size(); ++k) {
        const double dz = ext.z_nodes[k + 1] - ext.z_nodes[k];
        const double zm = 0.5 * (ext.z_nodes[k + 1] + ext.z_nodes[k]);
        const Eigen::MatrixXd wz = (ext.w[k + 1] - ext.w[k]) / dz;
        v += dz * std::pow(zm, a) *
             (wz.array().square() + 0.5 * (grads[k].array() + grads[k + 1].array())).matrix();
    }
    return v;
}

DecayCertificate decay_certificate(const ReducedMinimizer& m) {
    const ReducedGrid& g = m.grid;
    const FracParams& p = m.params;
    DecayCertificate cert;
    for (int i = 0; i < g.m_tau; ++i)
        for (int j = 0; j < g.m_yn; ++j) {
            const double r = g.node_radius(i, j);
            const double phi = m.values(i, j);
            cert.phi_constant = std::max(
                cert.phi_constant, phi * (1.0 + std::pow(r, p.n - 2.0 * p.s + 2.0)) / g.yn[j]);
            cert.rough_constant =
                std::max(cert.rough_constant, phi * std::pow(1.0 + r, p.n - 2.0 * p.s));
        }
    for (int i = 0; i < g.m_tau; ++i)
        cert.near_boundary_ratio = std::max(cert.near_boundary_ratio, m.values(i, 0) / g.yn[0]);

    const ReducedOperator op(g);
    const Eigen::MatrixXd v = v_profile(reduced_extend(op, m.values, p));
    for (int i = 0; i < g.m_tau; ++i)
        for (int j = 0; j < g.m_yn; ++j) {
            const double r = g.node_radius(i, j);
            cert.v_constant = std::max(
                cert.v_constant, v(i, j) * (1.0 + std::pow(r, 2.0 * p.n - 2.0 * p.s + 2.0)));
        }
    return cert;
}

namespace {

double level_lambda_impl(const Eigen::VectorXd& values, const Eigen::VectorXd& weights,
                         double tau, double exponent) {
    const double umax = values.maxCoeff();
    auto deficit_norm = [&](double lam) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < values.size(); ++i) {
            const double d = values[i] - lam;
            if (d > 0.0) acc += weights[i] * std::pow(d, exponent);
        }
        return std::pow(acc, 1.0 / exponent);
    };
    const double full = deficit_norm(0.0);
    if (!(tau > 0.0 && tau < full))
        throw std::invalid_argument("level_lambda: tau outside (0, ||u||)");
    double lo = 0.0, hi = umax;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (deficit_norm(mid) > tau ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double level_lambda(const GridFunction& u, double tau, const FracParams& p) {
    const double exponent = 2.0 * p.n / (p.n - 2.0 * p.s);
    Eigen::VectorXd w = Eigen::VectorXd::Constant(u.values.size(), u.grid.cell_weight());
    return level_lambda_impl(u.values, w, tau, exponent);
}

double level_lambda(const ReducedGrid& g, const Eigen::MatrixXd& u, double tau,
                    const FracParams& p) {
    const double exponent = 2.0 * p.n / (p.n - 2.0 * p.s);
    Eigen::VectorXd vals(g.m_tau * g.m_yn), w(g.m_tau * g.m_yn);
    Eigen::Index k = 0;
    for (int i = 0; i < g.m_tau; ++i)
        for (int j = 0; j < g.m_yn; ++j, ++k) {
            vals[k] = u(i, j);
            w[k] = g.tau_weight(i) * g.h_yn;
        }
    return level_lambda_impl(vals, w, tau, exponent);
}

}  // namespace frachs
