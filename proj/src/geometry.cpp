#include "frachs/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "frachs/math.hpp"

namespace frachs {

namespace {

Eigen::VectorXd unit_dir(const Eigen::VectorXd& x) {
    const double r = x.norm();
    return r > 0 ? Eigen::VectorXd(x / r) : Eigen::VectorXd::Zero(x.size());
}

}  // namespace

BoundaryProfile BoundaryProfile::power_law(int n, double coeff, double alpha, double r0) {
    if (n < 2) throw std::invalid_argument("BoundaryProfile: n >= 2");
    BoundaryProfile bp;
    bp.r0 = r0;
    bp.f = [coeff, alpha](const Eigen::VectorXd& xp) {
        return coeff * std::pow(xp.norm(), alpha);
    };
    bp.grad = [coeff, alpha](const Eigen::VectorXd& xp) -> Eigen::VectorXd {
        const double r = xp.norm();
        if (r == 0.0) return Eigen::VectorXd::Zero(xp.size());
        return coeff * alpha * std::pow(r, alpha - 1.0) * unit_dir(xp);
    };
    return bp;
}

BoundaryProfile BoundaryProfile::power_log(int n, double coeff, double alpha, double kappa,
                                           double r0) {
    if (n < 2) throw std::invalid_argument("BoundaryProfile: n >= 2");
    BoundaryProfile bp;
    bp.r0 = std::min(r0, 0.5);  // keep |log r| bounded away from zero
    bp.f = [coeff, alpha, kappa](const Eigen::VectorXd& xp) {
        const double r = xp.norm();
        if (r == 0.0) return 0.0;
        return coeff * std::pow(r, alpha) * std::pow(std::abs(std::log(r)), kappa);
    };
    bp.grad = [coeff, alpha, kappa](const Eigen::VectorXd& xp) -> Eigen::VectorXd {
        const double r = xp.norm();
        if (r == 0.0) return Eigen::VectorXd::Zero(xp.size());
        const double l = std::abs(std::log(r));
        const double dr = std::pow(r, alpha - 1.0) * std::pow(l, kappa - 1.0) *
                          (alpha * l - kappa);  // r < 1 assumed
        return coeff * dr * unit_dir(xp);
    };
    return bp;
}

BoundaryProfile BoundaryProfile::flat(int n, double r0) {
    if (n < 2) throw std::invalid_argument("BoundaryProfile: n >= 2");
    BoundaryProfile bp;
    bp.r0 = r0;
    bp.f = [](const Eigen::VectorXd&) { return 0.0; };
    bp.grad = [](const Eigen::VectorXd& xp) -> Eigen::VectorXd {
        return Eigen::VectorXd::Zero(xp.size());
    };
    return bp;
}

BoundaryProfile BoundaryProfile::named(const std::string& name, int n, double coeff,
                                       double alpha, double kappa, double r0) {
    if (name == "paraboloid-concave") return power_law(n, -1.0, 2.0, r0);
    if (name == "paraboloid-convex") return power_law(n, 1.0, 2.0, r0);
    if (name == "power-law") return power_law(n, coeff, alpha, r0);
    if (name == "power-log") return power_log(n, coeff, alpha, kappa, r0);
    if (name == "flat") return flat(n, r0);
    throw std::invalid_argument("BoundaryProfile: unknown profile '" + name + "'");
}

namespace {

struct SphereAverages {
    double f = 0, f1 = 0, f2 = 0, f3 = 0;
};

SphereAverages sphere_averages(const BoundaryProfile& bp, double tau, int n) {
    SphereAverages out;
    if (n == 2) {
        Eigen::VectorXd xp(1), xm(1);
        xp << tau;
        xm << -tau;
        for (const auto& x : {xp, xm}) {
            const double fv = bp.f(x);
            const double gv = bp.grad(x).norm();
            out.f += 0.5 * fv;
            out.f1 += 0.5 * fv * fv;
            out.f2 += 0.5 * gv * gv;
            out.f3 += 0.5 * gv;
        }
        return out;
    }
    if (n == 3) {
        const int k = 64;
        for (int i = 0; i < k; ++i) {
            const double th = 2.0 * std::numbers::pi * i / k;
            Eigen::VectorXd x(2);
            x << tau * std::cos(th), tau * std::sin(th);
            const double fv = bp.f(x);
            const double gv = bp.grad(x).norm();
            out.f += fv / k;
            out.f1 += fv * fv / k;
            out.f2 += gv * gv / k;
            out.f3 += gv / k;
        }
        return out;
    }
    throw std::invalid_argument("curvature_functionals: sphere quadrature for n = 2, 3 only");
}

// trend toward zero over the three smallest radii
bool vanishing_trend(const std::vector<double>& taus, const std::vector<double>& vals) {
    // taus ascending; vals aligned
    if (taus.size() < 3) return false;
    const double v0 = std::abs(vals[0]), v1 = std::abs(vals[1]), v2 = std::abs(vals[2]);
    return v0 < v1 && v1 < v2 && v0 <= 0.6 * v2;
}

}  // namespace

CurvatureReport curvature_functionals(const BoundaryProfile& bp, std::vector<double> taus,
                                      const FracParams& p) {
    if (taus.empty()) throw std::invalid_argument("curvature_functionals: empty radius sample");
    std::sort(taus.begin(), taus.end());
    if (taus.front() <= 0.0 || taus.back() >= bp.r0)
        throw std::invalid_argument("curvature_functionals: radii must lie in (0, r0)");

    CurvatureReport rep;
    rep.taus = taus;
    for (double tau : taus) {
        const auto avg = sphere_averages(bp, tau, p.n);
        rep.f.push_back(avg.f);
        rep.f1.push_back(avg.f1);
        rep.f2.push_back(avg.f2);
        rep.f3.push_back(avg.f3);
    }

    rep.concave = std::all_of(rep.f.begin(), rep.f.end(), [](double v) { return v < 0.0; });

    // alpha from log-log regression over the smallest sampled decade
    std::vector<double> lt, lf;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        if (taus[i] > 10.0 * taus.front()) break;
        if (rep.f[i] == 0.0) continue;
        lt.push_back(taus[i]);
        lf.push_back(rep.f[i]);
    }
    rep.alpha_hat = lt.size() >= 2 ? fit_loglog_slope(lt, lf) : 0.0;

    if (rep.concave) {
        // regular variation: f(2 tau)/f(tau) ~ 2^alpha at the smallest radii
        bool rv = true;
        for (int k = 0; k < 3 && k < static_cast<int>(taus.size()); ++k) {
            if (2.0 * taus[k] >= bp.r0) continue;
            const double ratio =
                sphere_averages(bp, 2.0 * taus[k], p.n).f / rep.f[static_cast<std::size_t>(k)];
            const double dev = std::abs(ratio / std::pow(2.0, rep.alpha_hat) - 1.0);
            if (k == 0 && dev > 0.1) rv = false;
            if (dev > 0.25) rv = false;
        }
        rep.rv_ok = rv;

        std::vector<double> cond, f1rel;
        for (std::size_t i = 0; i < taus.size() && i < 3; ++i) {
            cond.push_back(taus[i] * rep.f2[i] / rep.f[i]);
            f1rel.push_back(rep.f1[i] / (taus[i] * std::abs(rep.f[i])));
        }
        rep.cond_ok = vanishing_trend(taus, cond);
        rep.f1_ok = vanishing_trend(taus, f1rel);
    }
    return rep;
}

FlattenMap flatten_map(const BoundaryProfile& bp, double eps, int n) {
    if (eps <= 0.0) throw std::invalid_argument("flatten_map: eps must be positive");
    FlattenMap fm;
    fm.eps = eps;
    fm.jacobian_x = std::pow(eps, -n);
    fm.jacobian_xt = std::pow(eps, -n - 1);
    const double r0 = bp.r0;
    auto f = bp.f;
    fm.forward = [f, eps, n](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd y = x;
        y[n - 1] -= f(x.head(n - 1));
        return y / eps;
    };
    fm.inverse = [f, eps, n, r0](const Eigen::VectorXd& y) -> Eigen::VectorXd {
        Eigen::VectorXd x = eps * y;
        if (x.head(n - 1).norm() > r0)
            throw std::invalid_argument("flatten_map: inverse outside the validity radius");
        x[n - 1] += f(x.head(n - 1));
        return x;
    };
    fm.forward_xt = [fwd = fm.forward, eps, n](const Eigen::VectorXd& xt) -> Eigen::VectorXd {
        Eigen::VectorXd out(n + 1);
        out.head(n) = fwd(xt.head(n));
        out[n] = xt[n] / eps;
        return out;
    };
    fm.inverse_xt = [inv = fm.inverse, eps, n](const Eigen::VectorXd& yz) -> Eigen::VectorXd {
        Eigen::VectorXd out(n + 1);
        out.head(n) = inv(yz.head(n));
        out[n] = yz[n] * eps;
        return out;
    };
    return fm;
}

ReducedSampler::ReducedSampler(const ReducedGrid& g, const Eigen::MatrixXd& field,
                               const FracParams& p, bool extrapolate_decay)
    : g_(g), f_(field), extrapolate_(extrapolate_decay) {
    if (extrapolate_) {
        decay_power_ = p.n - 2.0 * p.s + 2.0;
        // least-squares fit of the decay constant over the outer rim
        double num = 0.0, den = 0.0;
        for (int i = 0; i < g_.m_tau; ++i)
            for (int j = 0; j < g_.m_yn; ++j) {
                const double r = g_.node_radius(i, j);
                if (r < 0.7 * g_.R) continue;
                const double model = g_.yn[j] / (1.0 + std::pow(r, decay_power_));
                num += f_(i, j) * model;
                den += model * model;
            }
        decay_constant_ = den > 0.0 ? num / den : 0.0;
    }
}

double ReducedSampler::operator()(double tau, double yn) const {
    tau = std::abs(tau);
    if (yn <= 0.0) return 0.0;
    const bool outside = tau > g_.tau.back() || yn > g_.yn.back();
    if (outside) {
        if (!extrapolate_) return 0.0;
        const double r = std::hypot(tau, yn);
        return decay_constant_ * yn / (1.0 + std::pow(r, decay_power_));
    }
    // tau: cell centers, even reflection at 0
    const double ft = tau / g_.h_tau - 0.5;
    int i0 = static_cast<int>(std::floor(ft));
    double wt = ft - i0;
    if (i0 < 0) {
        i0 = 0;
        wt = 0.0;  // constant across the reflection cell
    }
    const int i1 = std::min(i0 + 1, g_.m_tau - 1);
    // yn: vertex nodes with zero rows at 0 and R
    const double fy = yn / g_.h_yn - 1.0;
    int j0 = static_cast<int>(std::floor(fy));
    const double wy = fy - j0;
    auto row = [&](int i) {
        const double low = j0 >= 0 ? f_(i, j0) : 0.0;
        const double high = j0 + 1 < g_.m_yn ? f_(i, j0 + 1) : 0.0;
        return (1.0 - wy) * low + wy * high;
    };
    return (1.0 - wt) * row(i0) + wt * row(i1);
}

GridFunction trial_function(const ReducedMinimizer& m, const BoundaryProfile& bp, double eps,
                            double delta, const Grid& omega_grid) {
    const FracParams& p = m.params;
    if (p.n != 2 || omega_grid.dim() != 2)
        throw std::invalid_argument("trial_function: sampled assembly implemented for n = 2");
    if (!(delta < bp.r0)) throw std::invalid_argument("trial_function: delta must be < r0");
    if (eps < 4.0 * omega_grid.min_spacing())
        throw numerical_error(
            "trial_function: eps below the grid resolution (concentration scale unresolved)");
    if (delta / eps > m.grid.R)
        throw numerical_error("trial_function: cutoff support exceeds the reduced box");

    const ReducedSampler phi(m.grid, m.values, p, true);
    const double amp = std::pow(eps, -p.y_frak);
    GridFunction out = GridFunction::zero(omega_grid);
    Eigen::VectorXd xp(1);
    for (std::size_t idx = 0; idx < omega_grid.size(); ++idx) {
        const auto x = omega_grid.node(idx);
        xp << x[0];
        const double yflat = x[1] - bp.f(xp);
        const double rflat = std::hypot(x[0], yflat);
        if (rflat >= delta || yflat <= 0.0) continue;
        out.values[static_cast<Eigen::Index>(idx)] =
            amp * phi(std::abs(x[0]) / eps, yflat / eps) * cutoff(rflat, delta);
    }
    return out;
}

CorrectionIntegrals correction_integrals(const ReducedMinimizer& m, const FracParams& p,
                                         double alpha) {
    if (alpha < 1.0 || alpha >= p.n - 2.0 * p.s + 3.0)
        throw std::invalid_argument("correction_integrals: alpha outside [1, n-2s+3)");
    const ReducedGrid& g = m.grid;
    const double pexp = p.two_star_sigma;
    const double e2 = (p.s - p.sigma) * pexp + 2.0;  // radial exponent in c1

    CorrectionIntegrals out;

    // c1 on the native grid plus a doubled-density resample for the error bar
    auto c1_quadrature = [&](int refine) {
        const ReducedSampler phi(g, m.values, p, true);
        const int mt = g.m_tau * refine, my = g.m_yn * refine;
        const double ht = g.R / mt, hy = g.R / my;
        double acc = 0.0;
        for (int i = 0; i < mt; ++i) {
            const double tau = (i + 0.5) * ht;
            for (int j = 0; j < my; ++j) {
                const double yn = (j + 0.5) * hy;
                const double r2 = tau * tau + yn * yn;
                acc += ht * hy * std::pow(tau, alpha + p.n - 2.0) * yn *
                       std::pow(phi(tau, yn), pexp) * std::pow(r2, -0.5 * e2);
            }
        }
        return acc;
    };
    out.c1 = c1_quadrature(1);
    out.c1_error = std::abs(out.c1 - c1_quadrature(2));

    // tail slope of the tau-integrand over the outer window
    {
        std::vector<double> lt, lg;
        for (int i = 0; i < g.m_tau; ++i) {
            const double tau = g.tau[i];
            if (tau < 0.35 * g.R || tau > 0.9 * g.R) continue;
            double inner = 0.0;
            for (int j = 0; j < g.m_yn; ++j) {
                const double r2 = tau * tau + g.yn[j] * g.yn[j];
                inner += g.h_yn * g.yn[j] * std::pow(m.values(i, j), pexp) *
                         std::pow(r2, -0.5 * e2);
            }
            const double gval = std::pow(tau, alpha + p.n - 2.0) * inner;
            if (gval <= 0.0) continue;
            lt.push_back(tau);
            lg.push_back(gval);
        }
        out.c1_tail_slope = lt.size() >= 2 ? fit_loglog_slope(lt, lg) : 0.0;
    }

    // c2: boundary trace of the extension gradient
    const ReducedOperator op(g);
    const auto ext = reduced_extend(op, m.values, p);
    const auto nz = ext.z_nodes.size();
    auto c2_quadrature = [&](int stride) {
        // second-order one-sided normal derivative on the y_n = 0 row
        std::vector<Eigen::VectorXd> q;
        std::vector<double> zs;
        for (std::size_t k = 0; k < nz; k += stride) {
            Eigen::VectorXd d(g.m_tau);
            for (int i = 0; i < g.m_tau; ++i)
                d[i] = (4.0 * ext.w[k](i, 0) - ext.w[k](i, 1)) / (2.0 * g.h_yn);
            q.push_back(d.array().square());
            zs.push_back(ext.z_nodes[k]);
        }
        double acc = 0.0;
        for (std::size_t k = 0; k + 1 < q.size(); ++k) {
            const double dz = zs[k + 1] - zs[k];
            const double zm = 0.5 * (zs[k] + zs[k + 1]);
            const Eigen::VectorXd qm = 0.5 * (q[k] + q[k + 1]);
            for (int i = 0; i < g.m_tau; ++i)
                acc += g.h_tau * dz * std::pow(zm, 1.0 - 2.0 * p.s) *
                       std::pow(g.tau[i], p.n + alpha - 2.0) * qm[i];
        }
        return acc;
    };
    out.c2 = c2_quadrature(1);
    out.c2_error = std::abs(out.c2 - c2_quadrature(2));

    if (!std::isfinite(out.c1) || !std::isfinite(out.c2))
        throw numerical_error("correction_integrals: non-finite quadrature");
    return out;
}

TrialSweep trial_quotient_sweep(const ReducedMinimizer& m, const BoundaryProfile& bp,
                                const FracParams& p, const std::vector<double>& eps_list,
                                double delta) {
    if (p.n != 2)
        throw std::invalid_argument("trial_quotient_sweep: flattened assembly for n = 2");
    if (eps_list.empty()) throw std::invalid_argument("trial_quotient_sweep: empty eps list");
    if (!(delta < bp.r0)) throw std::invalid_argument("trial_quotient_sweep: delta < r0");

    const ReducedGrid& g = m.grid;
    const ReducedOperator op(g);
    const auto ext = reduced_extend(op, m.values, p);
    const auto nz = ext.z_nodes.size();
    const double a_w = (p.sigma - p.s) * p.two_star_sigma;

    // z-integrated pairings of the extension: everything the flattened energy
    // needs beyond the exact spectral bulk. Central differences are only ever
    // multiplied by cutoff factors or F-couplings, never by the O(1) bulk.
    const int mt = g.m_tau, my = g.m_yn;
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(mt, my);    // int zw |grad W|^2
    Eigen::MatrixXd P2 = Eigen::MatrixXd::Zero(mt, my);   // int zw W_tau W_yn
    Eigen::MatrixXd P5 = Eigen::MatrixXd::Zero(mt, my);   // int zw W_yn^2
    Eigen::MatrixXd Pc1 = Eigen::MatrixXd::Zero(mt, my);  // int zw W W_tau
    Eigen::MatrixXd Pc2 = Eigen::MatrixXd::Zero(mt, my);  // int zw W W_yn
    Eigen::MatrixXd Pc0 = Eigen::MatrixXd::Zero(mt, my);  // int zw W^2
    {
        std::vector<Eigen::MatrixXd> gt(nz), gy(nz);
        for (std::size_t k = 0; k < nz; ++k) {
            gt[k] = reduced_d_tau(g, ext.w[k]);
            gy[k] = reduced_d_yn(g, ext.w[k]);
        }
        for (std::size_t k = 0; k + 1 < nz; ++k) {
            const double dz = ext.z_nodes[k + 1] - ext.z_nodes[k];
            const double zm = 0.5 * (ext.z_nodes[k] + ext.z_nodes[k + 1]);
            const double zw = dz * std::pow(zm, 1.0 - 2.0 * p.s);
            const Eigen::MatrixXd wb = 0.5 * (ext.w[k] + ext.w[k + 1]);
            const Eigen::MatrixXd wz = (ext.w[k + 1] - ext.w[k]) / dz;
            const Eigen::MatrixXd wt = 0.5 * (gt[k] + gt[k + 1]);
            const Eigen::MatrixXd wn = 0.5 * (gy[k] + gy[k + 1]);
            V += zw * (wt.array().square() + wn.array().square() + wz.array().square()).matrix();
            P2 += zw * (wt.array() * wn.array()).matrix();
            P5 += zw * wn.array().square().matrix();
            Pc1 += zw * (wb.array() * wt.array()).matrix();
            Pc2 += zw * (wb.array() * wn.array()).matrix();
            Pc0 += zw * wb.array().square().matrix();
        }
    }

    TrialSweep sweep;
    sweep.eps_list = eps_list;
    sweep.s_ref = m.quotient;

    const double mes = g.h_tau * g.h_yn;  // per-sign native cell measure (n = 2)
    Eigen::VectorXd xp(1);
    for (double eps : eps_list) {
        if (delta / eps > g.R)
            throw numerical_error("trial_quotient_sweep: cutoff support exceeds the box");

        double energy = m.quotient / p.c_s;
        double denom_p = 1.0;
        for (double sgn : {-1.0, 1.0}) {
            for (int i = 0; i < mt; ++i) {
                const double y1 = sgn * g.tau[i];
                xp << eps * y1;
                const double fval = bp.f(xp);
                const double fp = bp.grad(xp)[0];
                for (int j = 0; j < my; ++j) {
                    const double y2 = g.yn[j];
                    const double r = g.node_radius(i, j);
                    const double c = cutoff(eps * r, delta);
                    const double cd = cutoff_deriv(eps * r, delta);
                    const double c2 = c * c;

                    // energy: exact bulk minus the cutoff tail, plus the
                    // F-couplings and cutoff-gradient corrections
                    energy -= mes * (1.0 - c2) * V(i, j);
                    energy += mes * c2 * fp * (fp * P5(i, j) - 2.0 * sgn * P2(i, j));
                    if (cd != 0.0) {
                        const double g1 = cd * (y1 - y2 * fp) / r;
                        const double gn = cd * y2 / r;
                        energy += mes * 2.0 * eps * c *
                                  (g1 * (sgn * Pc1(i, j) - fp * Pc2(i, j)) + gn * Pc2(i, j));
                        energy += mes * eps * eps * (g1 * g1 + gn * gn) * Pc0(i, j);
                    }

                    // denominator: unit normalization minus the cutoff tail,
                    // plus the boundary-shift of the singular weight
                    const double upow = std::pow(m.values(i, j), p.two_star_sigma);
                    const double rc = std::pow(g.clamped_radius(i, j), a_w);
                    denom_p -= mes * (1.0 - std::pow(c, p.two_star_sigma)) * upow * rc;
                    if (fval != 0.0) {
                        const double rho = std::hypot(y1, y2 + fval / eps);
                        const double floor =
                            std::max(g.gauge_radius, 0.5 * std::min(g.h_tau, g.h_yn));
                        const double rct = std::pow(std::max(rho, floor), a_w);
                        denom_p += mes * std::pow(c, p.two_star_sigma) * upow * (rct - rc);
                    }
                }
            }
        }
        sweep.quotients.push_back(p.c_s * energy / std::pow(denom_p, 2.0 / p.two_star_sigma));
        xp << eps;
        const double f_plus = bp.f(xp);
        xp << -eps;
        sweep.f_values.push_back(0.5 * (f_plus + bp.f(xp)));
        const double fv = sweep.f_values.back();
        sweep.covariate.push_back(fv != 0.0 ? std::abs(fv) / eps : eps);
    }

    std::vector<double> y(sweep.quotients.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = sweep.quotients[i] - sweep.s_ref;
    const auto fit = fit_line(sweep.covariate, y);
    sweep.slope = fit.slope;
    sweep.intercept = fit.intercept;
    sweep.max_residual = fit.max_residual;
    return sweep;
}

}  // namespace frachs
