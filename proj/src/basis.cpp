#include "fosr/basis.hpp"

#include <stdexcept>
#include <string>
#include <vector>

#include "fosr/errors.hpp"

namespace fosr {

Eigen::VectorXd clamped_uniform_knots(double lo, double hi, int num_basis, int degree) {
  const int interior = num_basis - degree - 1;
  Eigen::VectorXd knots(num_basis + degree + 1);
  for (int i = 0; i <= degree; ++i) {
    knots[i] = lo;
    knots[knots.size() - 1 - i] = hi;
  }
  for (int j = 1; j <= interior; ++j) {
    knots[degree + j] = lo + (hi - lo) * static_cast<double>(j) / (interior + 1);
  }
  return knots;
}

Eigen::MatrixXd bspline_design(const Eigen::VectorXd& grid, int num_basis, int degree) {
  if (degree < 0) throw std::invalid_argument("bspline_design: degree must be non-negative");
  if (num_basis < degree + 1) {
    throw std::invalid_argument("bspline_design: need M >= degree + 1 (M=" +
                                std::to_string(num_basis) + ", degree=" + std::to_string(degree) +
                                ")");
  }
  if (grid.size() < 2) throw std::invalid_argument("bspline_design: grid needs at least 2 points");
  for (Eigen::Index i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("bspline_design: grid must be strictly increasing");
    }
  }

  const double lo = grid[0];
  const double hi = grid[grid.size() - 1];
  const Eigen::VectorXd knots = clamped_uniform_knots(lo, hi, num_basis, degree);

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(grid.size(), num_basis);
  std::vector<double> values(degree + 1), left(degree + 1), right(degree + 1);

  for (Eigen::Index row = 0; row < grid.size(); ++row) {
    const double x = grid[row];
    // knot span s with knots[s] <= x < knots[s+1]; the right endpoint belongs to the last span
    int span = num_basis - 1;
    if (x < hi) {
      span = degree;
      while (span < num_basis - 1 && x >= knots[span + 1]) ++span;
    }

    values[0] = 1.0;
    for (int j = 1; j <= degree; ++j) {
      left[j] = x - knots[span + 1 - j];
      right[j] = knots[span + j] - x;
      double saved = 0.0;
      for (int r = 0; r < j; ++r) {
        const double temp = values[r] / (right[r + 1] + left[j - r]);
        values[r] = saved + right[r + 1] * temp;
        saved = left[j - r] * temp;
      }
      values[j] = saved;
    }
    for (int j = 0; j <= degree; ++j) out(row, span - degree + j) = values[j];
  }
  return out;
}

Eigen::MatrixXd second_difference_matrix(int num_basis) {
  if (num_basis < 3) throw std::invalid_argument("second_difference_matrix: need M >= 3");
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(num_basis - 2, num_basis);
  for (int i = 0; i < num_basis - 2; ++i) {
    d(i, i) = 1.0;
    d(i, i + 1) = -2.0;
    d(i, i + 2) = 1.0;
  }
  return d;
}

Eigen::MatrixXd pspline_penalty(int num_basis, double eta) {
  if (num_basis < 3) throw std::invalid_argument("pspline_penalty: need M >= 3");
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("pspline_penalty: eta must be in (0, 1]");

  // D2'D2 is pentadiagonal; fill it directly rather than forming the product.
  Eigen::MatrixXd r2 = Eigen::MatrixXd::Zero(num_basis, num_basis);
  const double stencil[3] = {1.0, -2.0, 1.0};
  for (int row = 0; row < num_basis - 2; ++row) {
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) r2(row + a, row + b) += stencil[a] * stencil[b];
    }
  }
  Eigen::MatrixXd out = (1.0 - eta) * r2;
  out.diagonal().array() += eta;
  return out;
}

BasisSystem make_basis(const Eigen::VectorXd& grid, int num_basis, int degree, double eta) {
  BasisSystem basis;
  basis.grid = grid;
  basis.theta = bspline_design(grid, num_basis, degree);
  basis.penalty = pspline_penalty(num_basis, eta);
  basis.eta = eta;
  basis.degree = degree;
  basis.theta_gram = basis.theta.transpose() * basis.theta;

  Eigen::LLT<Eigen::MatrixXd> llt(basis.penalty);
  if (llt.info() != Eigen::Success) throw NumericalError("penalty matrix is not positive definite");
  basis.penalty_logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return basis;
}

}  // namespace fosr
