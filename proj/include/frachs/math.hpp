#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace frachs {

/// Gamma function via a Lanczos approximation (g = 7, 9 coefficients).
/// Relative error below 1e-13 on (0, 10); reflection formula for x < 0.5.
double gamma_fn(double x);

/// Euler beta function B(a, b) = Gamma(a)Gamma(b)/Gamma(a+b).
double beta_fn(double a, double b);

/// Surface measure of the unit sphere S^k in R^{k+1}.
/// sphere_area(0) = 2 (two points), sphere_area(1) = 2*pi, sphere_area(2) = 4*pi.
double sphere_area(int k);

/// Radial cut-off profile: 1 on [0, r/2], 0 on [r, inf), C^1 smoothstep between.
/// The gradient is bounded by C/r. Used project-wide wherever a cut-off of
/// this shape is required, so every module sees the identical profile.
double cutoff(double v, double r);

/// Derivative of cutoff() with respect to v.
double cutoff_deriv(double v, double r);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;
};

/// Least-squares straight line y = slope*x + intercept.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Log-log regression slope of |y| against x (x, |y| > 0 required).
double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

/// Geometric node sequence t_k = t0 * ratio^k, last node <= t_max.
std::vector<double> geometric_nodes(double t0, double t_max, double ratio);

}  // namespace frachs
