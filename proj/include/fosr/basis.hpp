#pragma once

#include <Eigen/Dense>

namespace fosr {

/// B-spline evaluation matrix and full-rank roughness penalty shared by every prior.
///
/// `theta` is T x M (rows are grid points, columns basis functions) and
/// `penalty` is eta * I + (1 - eta) * D2' D2, where D2 is the second-difference
/// operator on the M coefficients. The Cholesky factor and log-determinant of
/// the penalty are cached since every marginal-likelihood evaluation needs them.
struct BasisSystem {
  Eigen::VectorXd grid;
  Eigen::MatrixXd theta;
  Eigen::MatrixXd penalty;
  double eta = 0.001;
  int degree = 3;

  Eigen::MatrixXd theta_gram;  // theta' theta
  double penalty_logdet = 0.0;

  Eigen::Index num_basis() const { return theta.cols(); }
  Eigen::Index grid_size() const { return theta.rows(); }
};

/// Full clamped knot vector: degree+1 copies of each boundary and
/// M - degree - 1 equally spaced interior knots.
Eigen::VectorXd clamped_uniform_knots(double lo, double hi, int num_basis, int degree);

Eigen::MatrixXd bspline_design(const Eigen::VectorXd& grid, int num_basis, int degree = 3);

Eigen::MatrixXd second_difference_matrix(int num_basis);

Eigen::MatrixXd pspline_penalty(int num_basis, double eta);

BasisSystem make_basis(const Eigen::VectorXd& grid, int num_basis, int degree = 3,
                       double eta = 0.001);

}  // namespace fosr
