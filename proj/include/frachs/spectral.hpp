#pragma once

#include <Eigen/Dense>

#include "frachs/grid.hpp"
#include "frachs/params.hpp"

namespace frachs {

/// Second-order finite-difference Dirichlet Laplacian on a tensor grid
/// (3-point in 1D, 5-point in 2D), homogeneous exterior values.
class DirichletOperator {
  public:
    explicit DirichletOperator(const Grid& grid);

    const Grid& grid() const { return grid_; }

    /// Matrix-vector product A u.
    Eigen::VectorXd apply(const Eigen::VectorXd& u) const;

    /// Edge-based Dirichlet energy <A u, u> in the grid L2 inner product,
    /// summation-by-parts exact (boundary edges against exterior zeros included).
    double stencil_energy(const GridFunction& u) const;

    /// Trace of the assembled operator (sum over diagonal).
    double trace() const;

  private:
    Grid grid_;
};

/// Dirichlet eigenpairs (lambda_j, phi_j), lambdas ascending, phi_j orthonormal
/// in the grid L2 inner product. Columns of `phis` are eigenvectors.
struct SpectralDecomposition {
    Grid grid;
    Eigen::VectorXd lambdas;
    Eigen::MatrixXd phis;
    int count = 0;

    /// Grid L2 coefficients <u, phi_j> for j < count.
    Eigen::VectorXd coefficients(const GridFunction& u) const;
};

/// Full or partial eigen-decomposition of the operator; dense symmetric
/// tridiagonal solves per axis, tensor-combined in 2D. k <= matrix size.
SpectralDecomposition eigenpairs(const DirichletOperator& op, int k);

/// Dense eigen-decomposition of the 1D Dirichlet stencil on one axis
/// (m interior nodes, spacing h); eigenvalues ascending, vectors
/// l2-orthonormal columns. Building block for tensor-structured solvers.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> axis_dirichlet_eigs(int m, double h);

/// Spectral fractional form  sum_j lambda_j^s <u, phi_j>^2.
double spectral_form(const SpectralDecomposition& dec, const GridFunction& u, double s);

/// Whole-space Riesz form via zero-extension to a periodic torus
/// `torus_factor` times larger than the support box: sum over continuous
/// Fourier modes of |xi|^{2s} |coefficient|^2. torus_factor >= 2 required.
double riesz_form(const GridFunction& u, double s, int torus_factor);

/// Weighted Lebesgue norm  || |x|^{sigma-s} u ||_{2*_sigma}  with the radius
/// clamped below by half the smallest grid spacing.
double weighted_norm(const GridFunction& u, const FracParams& p);

/// Rayleigh quotient  spectral_form / weighted_norm^2  (u != 0).
double rayleigh_quotient(const SpectralDecomposition& dec, const GridFunction& u,
                         const FracParams& p);

}  // namespace frachs
