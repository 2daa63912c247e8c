#pragma once

// Random small problems shared by the unit and acceptance suites.

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fosr/basis.hpp"
#include "fosr/model.hpp"

namespace fosr::testing {

struct MarginalInstance {
  FunctionalDataset data;
  BasisSystem basis;
  Eigen::MatrixXd a;
  std::vector<int> labels;
  Eigen::VectorXd lambda;
  double tau = 1.0;
};

inline void fill_normal(Eigen::MatrixXd& m, std::mt19937_64& gen, double scale = 1.0) {
  std::normal_distribution<double> z(0.0, scale);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = z(gen);
}

/// Random problem with n*t <= max_nt and m*k <= max_mk. The basis is a real
/// cubic B-spline system when m >= 4, otherwise a random matrix with a random
/// SPD penalty.
inline MarginalInstance random_marginal_instance(std::mt19937_64& gen, int max_nt = 60,
                                                 int max_mk = 12) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); };
  MarginalInstance inst;
  const int t = pick(2, 8);
  const int n = pick(2, std::max(2, max_nt / t));
  const int m = pick(2, std::min(6, max_mk));
  const int pc = pick(1, 5);
  const int pf = pick(1, 2);
  const int k_max = std::max(1, std::min(pc, max_mk / m));

  // candidate labeling with some null members, compacted to 1..K
  std::vector<int> labels(pc);
  for (auto& l : labels) l = pick(0, k_max);
  if (*std::max_element(labels.begin(), labels.end()) == 0) labels[0] = 1;
  compact_labels(labels);
  inst.labels = labels;
  const int k = *std::max_element(labels.begin(), labels.end());

  auto& d = inst.data;
  d.grid = Eigen::VectorXd::LinSpaced(t, 0.0, 1.0);
  d.Y.resize(n, t);
  d.W.resize(n, pf);
  d.X.resize(n, pc);
  fill_normal(d.Y, gen, 2.0);
  fill_normal(d.W, gen);
  fill_normal(d.X, gen);
  d.validate();

  if (m >= 4 && t >= 2) {
    inst.basis = make_basis(d.grid, m, 3, 0.001);
  } else {
    BasisSystem& b = inst.basis;
    b.grid = d.grid;
    b.theta.resize(t, m);
    fill_normal(b.theta, gen);
    Eigen::MatrixXd s(m, m);
    fill_normal(s, gen);
    b.penalty = s * s.transpose() + 0.5 * Eigen::MatrixXd::Identity(m, m);
    b.theta_gram = b.theta.transpose() * b.theta;
    b.penalty_logdet = std::log(b.penalty.determinant());
  }
  inst.a.resize(m, pf);
  fill_normal(inst.a, gen, 0.5);
  inst.lambda.resize(k);
  std::gamma_distribution<double> g(2.0, 1.0);
  for (int j = 0; j < k; ++j) inst.lambda[j] = 0.05 + g(gen);
  inst.tau = 0.2 + g(gen);
  return inst;
}

}  // namespace fosr::testing
