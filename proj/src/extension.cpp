#include "frachs/extension.hpp"

#include <cmath>
#include <stdexcept>

#include "frachs/bessel.hpp"
#include "frachs/math.hpp"

namespace frachs {

namespace {

// Single-mode coefficient profile d(t)/<u,phi> for eigenvalue lambda:
// t^s (2^{1-s}/Gamma(s)) lambda^{s/2} K_s(sqrt(lambda) t); tends to 1 as t->0.
double mode_profile(double lambda, double s, double t) {
    const double rho = std::sqrt(lambda);
    return std::pow(t, s) * std::pow(2.0, 1.0 - s) / gamma_fn(s) * std::pow(lambda, 0.5 * s) *
           bessel_k(s, rho * t);
}

// Dirichlet energy of one t-slab in x (summation-by-parts exact).
double slab_gradsq(const Grid& g, const Eigen::MatrixXd& vals, Eigen::Index col) {
    GridFunction u;
    u.grid = g;
    u.values = vals.col(col);
    return DirichletOperator(g).stencil_energy(u);
}

}  // namespace

std::vector<double> default_t_nodes(const SpectralDecomposition& dec) {
    const double lam_max = dec.lambdas[dec.count - 1];
    const double lam_min = dec.lambdas[0];
    const double t_min = 1e-4 / std::sqrt(lam_max);
    const double t_max = -std::log(1e-14) / std::sqrt(lam_min);
    return geometric_nodes(t_min, t_max, 1.15);
}

ExtensionField extend(const SpectralDecomposition& dec, const GridFunction& u,
                      const FracParams& p, const std::vector<double>& t_nodes) {
    if (t_nodes.empty()) throw std::invalid_argument("extend: empty t grid");
    const Eigen::VectorXd c = dec.coefficients(u);
    ExtensionField w;
    w.grid = dec.grid;
    w.s = p.s;
    w.t_nodes = t_nodes;
    Eigen::MatrixXd d(dec.count, static_cast<Eigen::Index>(t_nodes.size()));
    for (std::size_t k = 0; k < t_nodes.size(); ++k)
        for (int i = 0; i < dec.count; ++i)
            d(i, static_cast<Eigen::Index>(k)) = c[i] * mode_profile(dec.lambdas[i], p.s, t_nodes[k]);
    w.values = dec.phis * d;
    return w;
}

namespace {

double energy_on_nodes(const ExtensionField& w, int stride) {
    const Grid& g = w.grid;
    const double cw = g.cell_weight();
    const double a = 1.0 - 2.0 * w.s;
    std::vector<Eigen::Index> cols;
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(w.t_nodes.size()); k += stride)
        cols.push_back(k);
    if (cols.size() < 2) throw std::invalid_argument("extension_energy: too few t nodes");

    std::vector<double> gradsq(cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) gradsq[k] = slab_gradsq(g, w.values, cols[k]);

    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < cols.size(); ++k) {
        const double t0 = w.t_nodes[static_cast<std::size_t>(cols[k])];
        const double t1 = w.t_nodes[static_cast<std::size_t>(cols[k + 1])];
        const double dt = t1 - t0;
        const double tm = 0.5 * (t0 + t1);
        const double dts =
            cw * (w.values.col(cols[k + 1]) - w.values.col(cols[k])).squaredNorm() / (dt * dt);
        acc += dt * std::pow(tm, a) * (dts + 0.5 * (gradsq[k] + gradsq[k + 1]));
    }
    return acc;
}

}  // namespace

EnergyEstimate extension_energy(const ExtensionField& w) {
    EnergyEstimate e;
    e.value = energy_on_nodes(w, 1);
    e.richardson_error = std::abs(e.value - energy_on_nodes(w, 2));
    return e;
}

GridFunction conormal_derivative(const ExtensionField& w, const FracParams& p, double theta) {
    if (w.t_nodes.size() < 3)
        throw std::invalid_argument("conormal_derivative: need at least 3 t-nodes");
    if (theta <= 0.0) theta = 2.0 * p.s;
    const double a = 1.0 - 2.0 * w.s;

    // one-sided difference quotients at the two smallest panel midpoints
    const double m0 = 0.5 * (w.t_nodes[0] + w.t_nodes[1]);
    const double m1 = 0.5 * (w.t_nodes[1] + w.t_nodes[2]);
    const Eigen::VectorXd g0 =
        std::pow(m0, a) * (w.values.col(1) - w.values.col(0)) / (w.t_nodes[1] - w.t_nodes[0]);
    const Eigen::VectorXd g1 =
        std::pow(m1, a) * (w.values.col(2) - w.values.col(1)) / (w.t_nodes[2] - w.t_nodes[1]);

    // Richardson in t^theta: eliminate the leading correction term
    const double p0 = std::pow(m0, theta), p1 = std::pow(m1, theta);
    const Eigen::VectorXd extrap = (p1 * g0 - p0 * g1) / (p1 - p0);

    GridFunction out;
    out.grid = w.grid;
    out.values = -p.c_s * extrap;
    return out;
}

}  // namespace frachs
