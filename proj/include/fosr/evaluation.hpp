#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fosr {

/// Mean squared error over every entry of two T x P curve matrices.
double pointwise_mse(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& truth);

/// Pair-counting agreement between two partitions; the null label 0 is an
/// ordinary cluster here.
double rand_index(std::span<const int> a, std::span<const int> b);

/// Hubert-Arabie adjusted RAND index. Returns 1 when both partitions are
/// identical up to relabeling (including the degenerate all-one-cluster case).
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

/// S x P_c label draws -> P_c x P_c fraction of draws in which each pair shares a label.
Eigen::MatrixXd coclustering_matrix(const Eigen::MatrixXi& label_draws);

/// Index of the stored draw whose co-clustering indicator matrix is closest
/// (least squares) to the posterior co-clustering matrix.
Eigen::Index least_squares_draw(const Eigen::MatrixXi& label_draws, const Eigen::MatrixXd& coclustering);

struct Merge {
  int step;
  int left;   // cluster ids: leaves 0..n-1, merge s creates id n+s
  int right;
  double height;
  int size;
};

/// Average-linkage agglomerative clustering on 1 - coclustering.
std::vector<Merge> dendrogram(const Eigen::MatrixXd& coclustering);

/// Fraction of draws in which each predictor carries the null label.
Eigen::VectorXd percent_zero(const Eigen::MatrixXi& label_draws);

/// Indices with percent_zero below the cutoff.
std::vector<int> select_nonzero(const Eigen::VectorXd& percent_zero, double cutoff = 0.05);

/// Quantile with linear interpolation between order statistics placed at
/// plotting positions (k - 0.5) / n.
double quantile(std::vector<double> values, double prob);

struct CurveSummary {
  Eigen::VectorXd mean;
  Eigen::VectorXd lower;  // 2.5%
  Eigen::VectorXd upper;  // 97.5%
};

/// Pointwise posterior mean and 2.5/97.5 percentiles of S x T curve draws (S >= 40).
CurveSummary curve_summary(const Eigen::MatrixXd& curve_draws);

/// Standard deviation of bootstrap replicate means.
double bootstrap_se(std::span<const double> values, int reps, std::uint64_t seed);

struct EvaluationReport {
  int replicate_id = 0;
  int design_id = 0;
  int num_subjects = 0;
  std::string variant;
  double pointwise_mse = 0.0;
  double rand = 0.0;
  double adjusted_rand = 0.0;
  Eigen::VectorXd percent_zero;
  Eigen::MatrixXd coclustering;
  bool ok = true;
  std::string error;
};

struct CellSummary {
  int design_id;
  int num_subjects;
  std::string variant;
  int replicates;      // successful replicates
  int failed;          // replicates that raised
  double mse_mean, mse_se;
  double rand_mean, rand_se;
  double ari_mean, ari_se;
  bool complete() const { return failed == 0 && replicates >= 2; }
};

/// Groups reports by (design, N, variant) and bootstraps each metric's mean.
/// Cells are ordered by design, then N, then variant as listed in `variants`.
std::vector<CellSummary> aggregate_study(const std::vector<EvaluationReport>& reports,
                                         const std::vector<std::string>& variants,
                                         int bootstrap_reps, std::uint64_t seed);

}  // namespace fosr
