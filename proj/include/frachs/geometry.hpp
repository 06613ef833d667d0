#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "frachs/grid.hpp"
#include "frachs/halfspace.hpp"
#include "frachs/params.hpp"

namespace frachs {

/// Boundary graph x_n = F(x') near the origin with F(0) = 0, grad F(0) = 0.
/// x' has n-1 components (a scalar when n = 2).
struct BoundaryProfile {
    std::function<double(const Eigen::VectorXd&)> f;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad;
    double r0 = 1.0;  // validity radius of the parametrization

    /// Built-ins: power-law c |x'|^alpha, power-log c |x'|^alpha |log|x'||^kappa,
    /// and the flat boundary.
    static BoundaryProfile power_law(int n, double coeff, double alpha, double r0 = 1.0);
    static BoundaryProfile power_log(int n, double coeff, double alpha, double kappa,
                                     double r0 = 1.0);
    static BoundaryProfile flat(int n, double r0 = 1.0);
    /// Named config-level profiles: "paraboloid-concave", "paraboloid-convex",
    /// "power-law" (uses coeff/alpha), "power-log", "flat".
    static BoundaryProfile named(const std::string& name, int n, double coeff, double alpha,
                                 double kappa, double r0 = 1.0);
};

/// Spherical averages of the profile and the admissibility gates. The limit
/// conditions are evaluated by trend over the three smallest sampled radii.
struct CurvatureReport {
    std::vector<double> taus;
    std::vector<double> f, f1, f2, f3;
    double alpha_hat = 0.0;
    bool concave = false;  // f < 0 on all samples
    bool rv_ok = false;    // regular-variation ratio test
    bool cond_ok = false;  // tau f2 / f -> 0
    bool f1_ok = false;    // f1 / (tau |f|) -> 0
    bool all_pass() const { return concave && rv_ok && cond_ok && f1_ok; }
};

CurvatureReport curvature_functionals(const BoundaryProfile& bp, std::vector<double> taus,
                                      const FracParams& p);

/// Flattening transforms: y = Theta_1(x) = (x', x_n - F(x')),
/// Theta_eps = Theta_1 / eps, extended to (x, t) by t -> t / eps.
struct FlattenMap {
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> forward;   // x -> y
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> inverse;   // y -> x
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> forward_xt;  // (x,t) -> (y,z)
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> inverse_xt;
    double eps = 1.0;
    double jacobian_x = 1.0;   // eps^{-n}
    double jacobian_xt = 1.0;  // eps^{-n-1}
};

FlattenMap flatten_map(const BoundaryProfile& bp, double eps, int n);

/// Bilinear sampler of a reduced field, radial in y'; even reflection across
/// tau = 0, zero rows at y_n <= 0, decay-profile extrapolation outside the box.
class ReducedSampler {
  public:
    ReducedSampler(const ReducedGrid& g, const Eigen::MatrixXd& field, const FracParams& p,
                   bool extrapolate_decay);
    double operator()(double tau, double yn) const;

  private:
    ReducedGrid g_;
    Eigen::MatrixXd f_;
    double decay_constant_ = 0.0;
    double decay_power_ = 0.0;
    bool extrapolate_ = false;
};

/// Trial function Phi_eps(x) = eps^{-(n-2s)/2} Phi(Theta_eps(x)) phi_delta(Theta_1(x))
/// sampled on a box grid covering the boundary neighbourhood (n = 2).
GridFunction trial_function(const ReducedMinimizer& m, const BoundaryProfile& bp, double eps,
                            double delta, const Grid& omega_grid);

struct CorrectionIntegrals {
    double c1 = 0.0, c2 = 0.0;
    double c1_error = 0.0, c2_error = 0.0;  // refinement error bars
    double c1_tail_slope = 0.0;             // fitted log-log slope of the tau-integrand tail
};

/// The two curvature-correction quadratures evaluated on the reduced
/// minimizer: c1 pairs the weighted 2*-density against tau^{alpha+n}, c2 the
/// boundary trace of the extension gradient against tau^{n+alpha-2}.
/// alpha must lie in [1, n-2s+3).
CorrectionIntegrals correction_integrals(const ReducedMinimizer& m, const FracParams& p,
                                         double alpha);

struct TrialSweep {
    std::vector<double> eps_list;
    std::vector<double> quotients;  // I[Phi_eps] via the flattened energy route
    std::vector<double> f_values;   // spherical average f(eps) of the profile
    std::vector<double> covariate;  // eps^{-1}|f(eps)| (paraboloid shape for flat f)
    double s_ref = 0.0;             // m.quotient
    double slope = 0.0;             // fitted d(I - S_ref)/d covariate
    double intercept = 0.0;
    double max_residual = 0.0;
};

/// Quotient sweep of the trial family: energies evaluated in the flattened
/// coordinates (exact unit Jacobian) on the native reduced grid. The O(1)
/// bulk of both numerator and denominator is carried by the exact spectral
/// quotient and the unit normalization; quadratures only touch the cutoff
/// tails and the F-coupled corrections. Regression of I[Phi_eps] - S_ref
/// against the first-order covariate.
TrialSweep trial_quotient_sweep(const ReducedMinimizer& m, const BoundaryProfile& bp,
                                const FracParams& p, const std::vector<double>& eps_list,
                                double delta);

}  // namespace frachs
