#pragma once

#include <Eigen/Dense>
#include <vector>

#include "frachs/grid.hpp"
#include "frachs/params.hpp"
#include "frachs/spectral.hpp"

namespace frachs {

/// Extension field w(x, t) sampled on grid x t_nodes, carrying the weight
/// exponent 1-2s. Column k holds w(., t_nodes[k]).
struct ExtensionField {
    Grid grid;
    double s = 0.5;
    std::vector<double> t_nodes;
    Eigen::MatrixXd values;  // rows: grid nodes, cols: t nodes
};

/// Graded t-grid for the extension synthesis: geometric nodes
/// t_k = t_min r^k with t_min = 1e-4 / sqrt(lambda_max), r = 1.15, capped
/// where the slowest Bessel factor has decayed below 1e-14 of its peak.
std::vector<double> default_t_nodes(const SpectralDecomposition& dec);

/// Fourier-Bessel synthesis of the extension:
/// w(x,t) = sum_i d_i(t) phi_i(x),
/// d_i(t) = t^s (2^{1-s}/Gamma(s)) lambda_i^{s/2} <u,phi_i> K_s(lambda_i^{1/2} t).
ExtensionField extend(const SpectralDecomposition& dec, const GridFunction& u,
                      const FracParams& p, const std::vector<double>& t_nodes);

struct EnergyEstimate {
    double value = 0.0;
    double richardson_error = 0.0;  // |value - half-resolution value|
};

/// Weighted energy  E_s[w] = int int t^{1-2s} |grad_X w|^2 dx dt  by graded
/// trapezoid quadrature: stencil gradients in x, one-sided differences in t
/// evaluated at panel midpoints.
EnergyEstimate extension_energy(const ExtensionField& w);

/// Conormal derivative  C_s * (-lim_{t->0} t^{1-2s} dw/dt)  extrapolated from
/// the three smallest t-nodes by Richardson with exponent `theta`
/// (default 2s; sensitivity of the limit to this modeling choice is testable
/// by passing 2-2s instead).
GridFunction conormal_derivative(const ExtensionField& w, const FracParams& p,
                                 double theta = -1.0);

}  // namespace frachs
