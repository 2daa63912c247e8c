#include "fosr/marginal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fosr/errors.hpp"

namespace fosr {

ClusterSuffStats cluster_suff_stats(const Eigen::MatrixXd& x, const BasisSystem& basis,
                                    const Eigen::MatrixXd& residual) {
  ClusterSuffStats s;
  s.predictor_gram = x.transpose() * x;
  s.basis_gram = basis.theta_gram;
  s.cross = basis.theta.transpose() * (residual * x);
  s.residual_ss = residual.squaredNorm();
  s.nt = residual.size();
  return s;
}

void assemble_candidate(LabelUpdateWorkspace& ws, const ClusterSuffStats& stats,
                        const BasisSystem& basis, double tau) {
  const int k = static_cast<int>(ws.lambda.size());
  const auto m = basis.num_basis();
  const auto pc = static_cast<Eigen::Index>(ws.labels.size());
  ws.k_tilde = k;
  ws.one_hot = one_hot(ws.labels, k);
  ws.residual_ss = stats.residual_ss;
  ws.nt = stats.nt;

  // C' X'X C and Theta' E X C by aggregating member rows/columns
  Eigen::MatrixXd agg_rows = Eigen::MatrixXd::Zero(k, pc);
  Eigen::MatrixXd summed_cross = Eigen::MatrixXd::Zero(m, k);
  for (Eigen::Index p = 0; p < pc; ++p) {
    const int c = ws.labels[p];
    if (c == 0) continue;
    agg_rows.row(c - 1) += stats.predictor_gram.row(p);
    summed_cross.col(c - 1) += stats.cross.col(p);
  }
  Eigen::MatrixXd cluster_gram = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index p = 0; p < pc; ++p) {
    const int c = ws.labels[p];
    if (c == 0) continue;
    cluster_gram.col(c - 1) += agg_rows.col(p);
  }

  ws.G.resize(m * k, m * k);
  ws.g.resize(m * k);
  for (int a = 0; a < k; ++a) {
    ws.g.segment(a * m, m) = summed_cross.col(a);
    for (int b = 0; b < k; ++b) {
      ws.G.block(a * m, b * m, m, m) = cluster_gram(a, b) * stats.basis_gram;
    }
    ws.G.block(a * m, a * m, m, m) += (ws.lambda[a] / tau) * basis.penalty;
  }
}

void assemble_candidate_dense(LabelUpdateWorkspace& ws, const FunctionalDataset& data,
                              const BasisSystem& basis, const Eigen::MatrixXd& a, double tau) {
  const int k = static_cast<int>(ws.lambda.size());
  ws.k_tilde = k;
  ws.one_hot = one_hot(ws.labels, k);
  ws.e_hat_w = residual_free(data.Y, basis.theta, a, data.W);
  const Eigen::MatrixXd xt = assemble_design(data.X, ws.one_hot, basis.theta);
  ws.G = xt.transpose() * xt;
  for (int j = 0; j < k; ++j) {
    const auto m = basis.num_basis();
    ws.G.block(j * m, j * m, m, m) += (ws.lambda[j] / tau) * basis.penalty;
  }
  ws.g = xt.transpose() * ws.e_hat_w;
  ws.residual_ss = ws.e_hat_w.squaredNorm();
  ws.nt = ws.e_hat_w.size();
}

double marginal_loglik(const LabelUpdateWorkspace& ws, double tau, const BasisSystem& basis) {
  const double nt = static_cast<double>(ws.nt);
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  if (ws.k_tilde == 0) return -0.5 * nt * (log_2pi - std::log(tau)) - 0.5 * tau * ws.residual_ss;

  const double m = static_cast<double>(basis.num_basis());
  const double k = static_cast<double>(ws.k_tilde);
  Eigen::LLT<Eigen::MatrixXd> llt(ws.G);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("marginal likelihood: G is not positive definite (K~=" +
                         std::to_string(ws.k_tilde) + ", tau=" + std::to_string(tau) + ")");
  }
  const double logdet_g = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const Eigen::VectorXd half = llt.matrixL().solve(ws.g);  // L^{-1} g, so g'G^{-1}g = |half|^2
  const double quad = ws.residual_ss - half.squaredNorm();

  return -0.5 * nt * log_2pi + 0.5 * (nt - m * k) * std::log(tau) +
         0.5 * m * ws.lambda.array().log().sum() + 0.5 * k * basis.penalty_logdet -
         0.5 * logdet_g - 0.5 * tau * quad;
}

double marginal_loglik(std::span<const int> labels, const Eigen::VectorXd& lambda, double tau,
                       const BasisSystem& basis, const ClusterSuffStats& stats) {
  LabelUpdateWorkspace ws;
  ws.labels.assign(labels.begin(), labels.end());
  ws.lambda = lambda;
  assemble_candidate(ws, stats, basis, tau);
  return marginal_loglik(ws, tau, basis);
}

}  // namespace fosr
