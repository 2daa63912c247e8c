#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace fosr {

/// Prior family placed on the clusterable coefficient curves.
enum class Variant {
  kFosr,      // independent smoothing prior per predictor
  kFosrPm,    // point mass at zero mixed with the smoothing prior
  kFosrDp,    // Dirichlet process clustering
  kFosrDppm,  // point mass at zero mixed with a Dirichlet process
};

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

inline bool has_labels(Variant v) { return v != Variant::kFosr; }
inline bool has_null_cluster(Variant v) { return v == Variant::kFosrPm || v == Variant::kFosrDppm; }
inline bool has_concentration(Variant v) { return v == Variant::kFosrDp || v == Variant::kFosrDppm; }
inline bool clusters_predictors(Variant v) { return has_concentration(v); }

/// Response curves on a common grid plus free-effect (W) and clusterable (X) predictors.
///
/// W carries the intercept as an all-ones column.
struct FunctionalDataset {
  Eigen::MatrixXd Y;  // N x T
  Eigen::MatrixXd W;  // N x P_f
  Eigen::MatrixXd X;  // N x P_c
  Eigen::VectorXd grid;
  std::vector<std::string> free_names;
  std::vector<std::string> cluster_names;

  Eigen::Index num_subjects() const { return Y.rows(); }
  Eigen::Index grid_size() const { return Y.cols(); }
  Eigen::Index num_free() const { return W.cols(); }
  Eigen::Index num_clusterable() const { return X.cols(); }

  /// Throws std::invalid_argument on inconsistent shapes. Fills in default names.
  void validate();
};

struct GammaPrior {
  double shape = 0.01;
  double rate = 0.01;
};

struct PriorConfig {
  Variant variant = Variant::kFosrDp;
  GammaPrior lambda{0.01, 0.01};
  GammaPrior tau{0.01, 0.01};
  GammaPrior alpha{1.0, 1.0};
  double alpha0 = 2.0;
  int num_basis = 8;
  int degree = 3;
  double eta = 0.001;

  void validate() const;
};

/// Everything sampled in one Gibbs iteration.
///
/// labels[p] is 0 for the null cluster (PM and DPPM only) and 1..K otherwise;
/// column k-1 of B and entry k-1 of lambda_b belong to cluster k.
struct ModelState {
  Eigen::MatrixXd A;  // M x P_f
  Eigen::MatrixXd B;  // M x K
  std::vector<int> labels;
  Eigen::VectorXd lambda_a;
  Eigen::VectorXd lambda_b;
  double tau = 1.0;
  double alpha = 1.0;
  long iteration = 0;

  int num_clusters() const { return static_cast<int>(lambda_b.size()); }
  int num_nonnull() const;

  /// Throws std::logic_error if labels are not compacted or lengths disagree.
  void check(bool allow_null) const;
};

/// P_c x K indicator matrix. Label 0 produces an all-zero row, which drops the
/// predictor from X*C.
Eigen::MatrixXd one_hot(std::span<const int> labels, int num_clusters);

/// Inverse of one_hot for matrices with at most one 1 per row.
std::vector<int> labels_from_one_hot(const Eigen::MatrixXd& c);

/// (X C) kron Theta; vec(Theta B (X C)') == result * vec(B).
Eigen::MatrixXd assemble_design(const Eigen::MatrixXd& x, const Eigen::MatrixXd& c,
                                const Eigen::MatrixXd& theta);

/// Y' - Theta A W' as a T x N matrix; column i holds subject i.
Eigen::MatrixXd free_residual_matrix(const Eigen::MatrixXd& y, const Eigen::MatrixXd& theta,
                                     const Eigen::MatrixXd& a, const Eigen::MatrixXd& w);

/// vec(Y' - Theta A W'), subject-major blocks of length T.
Eigen::VectorXd residual_free(const Eigen::MatrixXd& y, const Eigen::MatrixXd& theta,
                              const Eigen::MatrixXd& a, const Eigen::MatrixXd& w);

/// Coefficient curves of the clusterable predictors: Theta B C' (T x P_c).
Eigen::MatrixXd cluster_curves(const Eigen::MatrixXd& theta, const ModelState& state);

/// Renumber nonzero labels to 1..K in order of their current value and drop
/// the matching entries of lambda (if given). Returns K.
int compact_labels(std::vector<int>& labels, Eigen::VectorXd* lambda = nullptr);

/// Members per cluster, index 0 holding the null-cluster count.
std::vector<int> cluster_sizes(std::span<const int> labels, int num_clusters);

}  // namespace fosr
