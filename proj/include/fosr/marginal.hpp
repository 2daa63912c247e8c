#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fosr/basis.hpp"
#include "fosr/model.hpp"

namespace fosr {

/// Sufficient statistics for collapsing the cluster-level coefficients.
///
/// With the free effects held fixed, every candidate labeling only needs
/// X'X, Theta'Theta, Theta' E X (E = Y' - Theta A W') and the residual sum of
/// squares; the Kronecker blocks of G and g are aggregated from these.
struct ClusterSuffStats {
  Eigen::MatrixXd predictor_gram;  // X'X, P_c x P_c
  Eigen::MatrixXd basis_gram;      // Theta'Theta, M x M
  Eigen::MatrixXd cross;           // Theta' E X, M x P_c
  double residual_ss = 0.0;        // e_W' e_W
  Eigen::Index nt = 0;
};

/// `residual` is the T x N matrix Y' - Theta A W'.
ClusterSuffStats cluster_suff_stats(const Eigen::MatrixXd& x, const BasisSystem& basis,
                                    const Eigen::MatrixXd& residual);

/// Scratch state for evaluating one candidate labeling c'.
struct LabelUpdateWorkspace {
  std::vector<int> labels;  // c'
  Eigen::MatrixXd one_hot;  // C'
  int k_tilde = 0;
  Eigen::VectorXd lambda;   // Lambda_b', one per cluster of c'
  Eigen::MatrixXd G;        // X~'X~ + (Lambda_b' kron R) / tau
  Eigen::VectorXd g;        // X~' e_W
  double residual_ss = 0.0;
  Eigen::Index nt = 0;
  Eigen::VectorXd e_hat_w;  // only filled by the dense route
  std::vector<double> log_probs;
};

/// Fills one_hot, k_tilde, G, g from sufficient statistics. `ws.labels` and
/// `ws.lambda` must be set and compacted.
void assemble_candidate(LabelUpdateWorkspace& ws, const ClusterSuffStats& stats,
                        const BasisSystem& basis, double tau);

/// Same quantities as assemble_candidate but built from the explicit
/// NT x MK design (X C') kron Theta. Used for cross-checking; O(N T M K).
void assemble_candidate_dense(LabelUpdateWorkspace& ws, const FunctionalDataset& data,
                              const BasisSystem& basis, const Eigen::MatrixXd& a, double tau);

/// Log marginal density of e_W with the cluster coefficients integrated out:
///
///   -(NT/2) log 2pi + ((NT - M K~)/2) log tau + (M/2) log|Lambda'| + (K~/2) log|R|
///   - (1/2) log|G| - (tau/2) (e'e - g' G^{-1} g)
///
/// Throws NumericalError when G is not positive definite.
double marginal_loglik(const LabelUpdateWorkspace& ws, double tau, const BasisSystem& basis);

/// Convenience wrapper: assemble from sufficient statistics and evaluate.
double marginal_loglik(std::span<const int> labels, const Eigen::VectorXd& lambda, double tau,
                       const BasisSystem& basis, const ClusterSuffStats& stats);

}  // namespace fosr
