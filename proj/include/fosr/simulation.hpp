#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "fosr/model.hpp"

namespace fosr {

/// Settings of one simulated replicate.
struct SimulationSpec {
  int design_id = 1;
  int num_subjects = 30;
  int grid_size = 15;
  int num_free = 5;         // includes the intercept column
  int num_clusterable = 15;
  double rho = 0.75;        // Cov(x_p, x_p') = rho^|p - p'|
  double lengthscale = 10;  // Sigma'_ij = exp(-lengthscale (t_i - t_j)^2)
  double target_snr = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SimulatedTruth {
  Eigen::MatrixXd beta_true;   // T x P_c
  Eigen::MatrixXd alpha_true;  // T x P_f
  std::vector<int> labels_true;  // 0 marks a true-zero effect
  double sigma2 = 0.0;
};

struct SimulatedData {
  FunctionalDataset data;
  SimulatedTruth truth;
};

/// Label pattern of a design: designs 1 and 2 group the predictors 7/4/4,
/// designs 3 and 4 give each predictor its own curve. Designs 1 and 4 zero
/// out the first seven effects (label 0).
std::vector<int> design_labels(int design_id, int num_clusterable);

/// {1, sin(2 pi t), cos(2 pi t)} on the grid, each column scaled to unit
/// root-mean-square.
Eigen::MatrixXd fourier_truth_basis(const Eigen::VectorXd& grid);

/// exp(-lengthscale (t_i - t_j)^2)
Eigen::MatrixXd exponential_covariance(const Eigen::VectorXd& grid, double lengthscale);

/// Nugget variance giving var(signal) / (trace(Sigma')/T + sigma2) == target_snr,
/// floored at 1e-8. Throws std::invalid_argument for a constant signal.
double calibrate_noise(const Eigen::MatrixXd& signal, const Eigen::MatrixXd& sigma_prime,
                       double target_snr);

SimulatedData make_design(const SimulationSpec& spec);

}  // namespace fosr
