#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "frachs/errors.hpp"
#include "frachs/grid.hpp"
#include "frachs/params.hpp"

namespace frachs {

// ---------------------------------------------------------------------------
// Green kernels on the half-space (image-charge closed forms)
// ---------------------------------------------------------------------------

enum class KernelKind {
    SourceData,    // G_s(Y, xi): conormal data -> extension
    BoundaryData,  // Gamma_s(Y, xi): trace data -> extension
    Trace,         // G_s(y, xi) = G_s(y, 0, xi)
};

struct KernelPoint {
    Eigen::VectorXd y;   // point in R^n with y[n-1] > 0
    double z = 0.0;      // extension coordinate, >= 0
    Eigen::VectorXd xi;  // source point with xi[n-1] > 0
};

/// Closed-form kernel value; vanishes when y_n xi_n = 0, symmetric under
/// y <-> xi for the trace kind. Throws on the coincident singular point.
double green_kernel(KernelKind kind, const KernelPoint& pt, const FracParams& p,
                    double normalization);

/// Analytic gradient of the source-data kernel in (y, z): components
/// (d/dy_1, ..., d/dy_n, d/dz).
Eigen::VectorXd green_kernel_gradient(const KernelPoint& pt, const FracParams& p,
                                      double normalization);

struct KernelNormalizations {
    double c_tilde = 0.0;  // source-data constant
    double c_hat = 0.0;    // boundary-data constant
    double calibration_residual = 0.0;
};

/// c_hat is fixed by the approximate-identity property of the boundary-data
/// kernel (unit mass for every t); c_tilde is calibrated numerically so that
/// C_s times the conormal derivative of the kernel-smoothed field reproduces a
/// Gaussian test datum in least squares. Residual above 1e-4 is a hard error.
/// `quality` >= 1 refines the calibration sample and quadrature.
KernelNormalizations kernel_normalizations(const FracParams& p, int quality = 1);

/// Reference values for oracle tests: the closed Beta-integral form of c_hat
/// and the Riesz-potential constant the calibration should land on.
double c_hat_closed_form(const FracParams& p);
double c_tilde_riesz_reference(const FracParams& p);

struct BoundMargin {
    double lhs = 0.0;        // kernel (or gradient modulus) value
    double rhs_shape = 0.0;  // unconstanted bound shape
};

/// Source-kernel bound pair: lhs = G_s(Y,xi), rhs_shape = y_n^b xi_n^b
/// (|y-xi|^2+z^2)^{-(n-2s+2b)/2}. b_frak must lie in [0,1].
BoundMargin kernel_bound_margin(const KernelPoint& pt, double b_frak, const FracParams& p,
                                double normalization);

/// Gradient bound pair: lhs = |grad G_s|, rhs_shape the min(1, ...) form.
BoundMargin kernel_gradient_margin(const KernelPoint& pt, const FracParams& p,
                                   double normalization);

// ---------------------------------------------------------------------------
// s-Kelvin transform and the discrete degenerate operator
// ---------------------------------------------------------------------------

using FieldClosure = std::function<double(const Eigen::VectorXd&)>;

/// w*(X) = |X|^{2s-n} w(X/|X|^2); evaluation at X = 0 throws.
FieldClosure kelvin(FieldClosure w, const FracParams& p);

/// Discrete residual of L_s[w] = -div(t^{1-2s} grad w) at X, conservative
/// (n+1)-point stencil with spacing h; the last coordinate of X is the
/// weighted one and must exceed h/2.
double ls_residual(const FieldClosure& w, const Eigen::VectorXd& X, double s, double h);

// ---------------------------------------------------------------------------
// Reduced half-space minimizer in (tau = |y'|, y_n)
// ---------------------------------------------------------------------------

/// Radial-reduced box [0,R] x [0,R]: tau cell-centered (reflection at 0),
/// y_n vertex-centered with Dirichlet rows at 0 and R. Node measure
/// ang * tau^{n-2} * h_tau * h_yn with ang = |S^{n-2}|.
///
/// The half-space quotient is dilation invariant; minimizers form a dilation
/// orbit and the discrete minimizer settles at the lattice scale of its grid.
/// A positive `gauge_radius` clamps the singular weight below that radius and
/// selects the orbit representative with core scale ~ gauge_radius instead
/// (a smoother, h-stable profile with a heavier far tail). The default keeps
/// the raw weight.
struct ReducedGrid {
    int n = 2;
    double R = 10.0;
    int m_tau = 0, m_yn = 0;
    double h_tau = 0.0, h_yn = 0.0;
    std::vector<double> tau, yn;
    double ang = 2.0;
    double gauge_radius = 0.0;

    static ReducedGrid make(int n, double R, int res, double gauge_radius = 0.0);
    double tau_weight(int i) const;  // ang * tau_i^{n-2} * h_tau
    double node_radius(int i, int j) const;
    double clamped_radius(int i, int j) const;
};

/// Separable reduced operator -d_tau(tau^{n-2} d_tau)/tau^{n-2} - d^2_{y_n},
/// full eigen-decomposition per axis, orthonormal in the weighted product.
class ReducedOperator {
  public:
    explicit ReducedOperator(const ReducedGrid& g);

    const ReducedGrid& grid() const { return g_; }
    const Eigen::VectorXd& tau_lambdas() const { return ltau_; }
    const Eigen::VectorXd& yn_lambdas() const { return lyn_; }
    const Eigen::MatrixXd& tau_modes() const { return ptau_; }
    const Eigen::MatrixXd& yn_modes() const { return pyn_; }
    double lambda_min() const { return ltau_[0] + lyn_[0]; }
    double lambda_max() const { return ltau_[ltau_.size() - 1] + lyn_[lyn_.size() - 1]; }

    /// Coefficients of u in the tensor eigenbasis (weighted projections).
    Eigen::MatrixXd project(const Eigen::MatrixXd& u) const;
    Eigen::MatrixXd synthesize(const Eigen::MatrixXd& coef) const;
    /// A^s u via the eigenbasis (any real s, negative for the inverse).
    Eigen::MatrixXd apply_power(const Eigen::MatrixXd& u, double s) const;
    /// Quadratic form <A^s u, u> in the weighted inner product.
    double form(const Eigen::MatrixXd& u, double s) const;

  private:
    ReducedGrid g_;
    Eigen::VectorXd ltau_, lyn_;
    Eigen::MatrixXd ptau_, pyn_;      // weighted-orthonormal eigenvectors
    Eigen::MatrixXd ptau_w_, pyn_w_;  // diag(weights) * modes
};

/// Weighted critical norm || |y|^{sigma-s} u ||_{2*_sigma} on the reduced grid.
double reduced_weighted_norm(const ReducedGrid& g, const Eigen::MatrixXd& u,
                             const FracParams& p);

struct ReducedMinimizer {
    FracParams params;
    ReducedGrid grid;
    Eigen::MatrixXd values;  // Phi >= 0, zero on the y_n = 0 row by construction
    double quotient = 0.0;
    std::vector<double> history;
    int iterations = 0;
    int positivity_projections = 0;
    double el_residual = 0.0;
    double boundary_mass = 0.0;  // weighted 2*-mass outside 0.8 R
};

/// Euler-Lagrange fixed point: solve A^s v = weight * u^{2*-1}, project to the
/// positive cone, renormalize; stops when the quotient decrease drops below
/// tol. Non-monotone history or boundary mass >= 1e-3 are hard errors.
ReducedMinimizer halfspace_minimizer(const FracParams& p, double R, int res, double tol,
                                     int max_iter = 400, double gauge_radius = 0.0);

/// Stinga-Torrea extension of a reduced field in the z direction, synthesized
/// mode-wise on a graded z-grid.
struct ReducedExtension {
    ReducedGrid grid;
    double s = 0.5;
    std::vector<double> z_nodes;
    std::vector<Eigen::MatrixXd> w;  // field per z-node
};

ReducedExtension reduced_extend(const ReducedOperator& op, const Eigen::MatrixXd& u,
                                const FracParams& p);

/// V(y) = int z^{1-2s} |grad_Y W|^2 dz on the reduced grid.
Eigen::MatrixXd v_profile(const ReducedExtension& ext);

/// Central-difference partials of a reduced field: even reflection at tau = 0,
/// Dirichlet rows at y_n = 0 and at the outer box.
Eigen::MatrixXd reduced_d_tau(const ReducedGrid& g, const Eigen::MatrixXd& f);
Eigen::MatrixXd reduced_d_yn(const ReducedGrid& g, const Eigen::MatrixXd& f);

struct DecayCertificate {
    double phi_constant = 0.0;    // sup Phi (1 + |y|^{n-2s+2}) / y_n
    double v_constant = 0.0;      // sup V (1 + |y|^{2n-2s+2})
    double rough_constant = 0.0;  // sup Phi (1 + |y|)^{n-2s}
    double near_boundary_ratio = 0.0;  // sup over first y_n row of Phi / y_n
};

DecayCertificate decay_certificate(const ReducedMinimizer& m);

/// Level lambda with || (u-lambda)_+ ||_{2*_s on {u > lambda}} = tau, found by
/// monotone bisection. Requires 0 < tau < || u_+ ||_{2*_s}.
double level_lambda(const GridFunction& u, double tau, const FracParams& p);
double level_lambda(const ReducedGrid& g, const Eigen::MatrixXd& u, double tau,
                    const FracParams& p);

}  // namespace frachs
