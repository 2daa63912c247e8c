#include <doctest.h>

#include <Eigen/Dense>

#include "fosr/basis.hpp"

using namespace fosr;

namespace {
Eigen::VectorXd linspace(int n) { return Eigen::VectorXd::LinSpaced(n, 0.0, 1.0); }
}  // namespace

TEST_CASE("design on the default grid has unit row sums") {
  const Eigen::MatrixXd theta = bspline_design(linspace(15), 8);
  CHECK(theta.rows() == 15);
  CHECK(theta.cols() == 8);
  for (Eigen::Index t = 0; t < 15; ++t) CHECK(theta.row(t).sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(theta.minCoeff() >= 0.0);
  // clamped ends interpolate the first and last coefficient
  CHECK(theta(0, 0) == doctest::Approx(1.0));
  CHECK(theta(14, 7) == doctest::Approx(1.0));
}

TEST_CASE("cubic basis matches exact Cox-de Boor values") {
  // knots 0,0,0,0,1/2,1,1,1,1; values computed in rational arithmetic
  Eigen::VectorXd grid(4);
  grid << 0.0, 0.3, 0.7, 1.0;
  const Eigen::MatrixXd theta = bspline_design(grid, 5, 3);
  const double at03[] = {8.0 / 125, 279.0 / 500, 81.0 / 250, 27.0 / 500, 0.0};
  const double at07[] = {0.0, 27.0 / 500, 81.0 / 250, 279.0 / 500, 8.0 / 125};
  for (int j = 0; j < 5; ++j) {
    CHECK(theta(1, j) == doctest::Approx(at03[j]).epsilon(1e-14));
    CHECK(theta(2, j) == doctest::Approx(at07[j]).epsilon(1e-14));
  }
}

TEST_CASE("knot vector is clamped and uniform") {
  const Eigen::VectorXd k = clamped_uniform_knots(0.0, 1.0, 8, 3);
  REQUIRE(k.size() == 12);
  for (int i = 0; i < 4; ++i) {
    CHECK(k[i] == 0.0);
    CHECK(k[8 + i] == 1.0);
  }
  CHECK(k[5] - k[4] == doctest::Approx(0.2));
}

TEST_CASE("basis rejects bad input") {
  Eigen::VectorXd bad(3);
  bad << 0.0, 0.5, 0.5;
  CHECK_THROWS_AS(bspline_design(bad, 5), std::invalid_argument);
  CHECK_THROWS_AS(bspline_design(linspace(10), 3, 3), std::invalid_argument);
  CHECK_THROWS_AS(pspline_penalty(8, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(pspline_penalty(8, 1.5), std::invalid_argument);
}

TEST_CASE("penalty annihilates linear sequences up to the ridge term") {
  const double eta = 0.001;
  const Eigen::MatrixXd r = pspline_penalty(8, eta);
  Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(8, 1.0, 8.0);
  CHECK(b.dot(r * b) == doctest::Approx(eta * b.squaredNorm()).epsilon(1e-12));
  const Eigen::MatrixXd d2 = second_difference_matrix(8);
  CHECK(d2.rows() == 6);
  const Eigen::MatrixXd expected = eta * Eigen::MatrixXd::Identity(8, 8) + (1 - eta) * d2.transpose() * d2;
  CHECK((r - expected).cwiseAbs().maxCoeff() < 1e-14);
  // full rank and symmetric positive definite
  CHECK(Eigen::LLT<Eigen::MatrixXd>(r).info() == Eigen::Success);
}

TEST_CASE("basis system caches penalty log-determinant") {
  const BasisSystem b = make_basis(linspace(15), 8);
  const double direct = std::log(b.penalty.determinant());
  CHECK(b.penalty_logdet == doctest::Approx(direct).epsilon(1e-10));
  CHECK((b.theta_gram - b.theta.transpose() * b.theta).cwiseAbs().maxCoeff() < 1e-14);
}
