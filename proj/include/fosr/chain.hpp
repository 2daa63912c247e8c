#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fosr/model.hpp"

namespace fosr {

/// Post-burn-in draws of one chain.
///
/// Curve draws are flattened per stored iteration: column p*T + t of
/// `beta_draws` is predictor p at grid point t (same for `free_draws`).
/// `lambda_b` holds, per predictor, the smoothing precision of its cluster
/// (0 for the null cluster).
struct ChainOutput {
  Variant variant = Variant::kFosr;
  std::uint64_t seed = 0;
  long iterations = 0;
  long burn_in = 0;
  Eigen::Index grid_size = 0;
  Eigen::Index num_free = 0;
  Eigen::Index num_clusterable = 0;

  Eigen::MatrixXd beta_draws;
  Eigen::MatrixXd free_draws;
  Eigen::MatrixXi labels;
  Eigen::VectorXd tau;
  Eigen::VectorXd alpha;
  Eigen::VectorXi num_clusters;
  Eigen::MatrixXd lambda_a;
  Eigen::MatrixXd lambda_b;

  double elapsed_seconds = 0.0;

  Eigen::Index stored() const { return tau.size(); }

  /// S x T draws of one clusterable predictor's curve.
  Eigen::MatrixXd beta_curve_draws(Eigen::Index predictor) const;
  /// S x T draws of one free effect's curve.
  Eigen::MatrixXd free_curve_draws(Eigen::Index predictor) const;
  /// T x P_c posterior mean of the clusterable curves.
  Eigen::MatrixXd posterior_mean_beta() const;
  Eigen::MatrixXd posterior_mean_free() const;
};

/// Called after every iteration with the 1-based iteration count.
using ProgressCallback = std::function<void(long)>;

/// Runs one chain from the default initial state. Deterministic in `seed`.
/// Numerical failures are rethrown as ChainError carrying the iteration.
ChainOutput run_chain(const FunctionalDataset& data, const PriorConfig& prior, long iterations,
                      long burn_in, std::uint64_t seed, const ProgressCallback& progress = {});

/// Writes one CSV per tracked quantity plus metadata.json into `dir`.
/// Returns the files written, relative to `dir`.
std::vector<std::string> write_chain(const ChainOutput& chain, const FunctionalDataset& data,
                                     const PriorConfig& prior, const std::filesystem::path& dir);

}  // namespace fosr
