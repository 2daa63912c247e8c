#include "fosr/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fosr/random.hpp"

namespace fosr {

void SimulationSpec::validate() const {
  if (design_id < 1 || design_id > 4) {
    throw std::invalid_argument("design id must be 1, 2, 3 or 4 (got " + std::to_string(design_id) + ")");
  }
  if (num_subjects < 2) throw std::invalid_argument("need at least 2 subjects");
  if (grid_size < 2) throw std::invalid_argument("need at least 2 grid points");
  if (num_free < 1) throw std::invalid_argument("need at least the intercept as a free effect");
  if (num_clusterable < 1) throw std::invalid_argument("need at least one clusterable predictor");
  if (!(target_snr > 0.0)) throw std::invalid_argument("target SNR must be positive");
  if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("rho must lie in (-1, 1)");
  if ((design_id == 1 || design_id == 2) && num_clusterable < 3) {
    throw std::invalid_argument("designs 1 and 2 need at least 3 clusterable predictors");
  }
}

std::vector<int> design_labels(int design_id, int num_clusterable) {
  std::vector<int> labels(num_clusterable);
  // first 7/15 of the predictors in the first group, the rest split evenly
  const int first = std::max(1, static_cast<int>(std::lround(7.0 * num_clusterable / 15.0)));
  const int second = first + (num_clusterable - first + 1) / 2;
  for (int p = 0; p < num_clusterable; ++p) {
    switch (design_id) {
      case 1: labels[p] = p < first ? 0 : (p < second ? 1 : 2); break;
      case 2: labels[p] = p < first ? 1 : (p < second ? 2 : 3); break;
      case 3: labels[p] = p + 1; break;
      case 4: labels[p] = p < first ? 0 : p - first + 1; break;
      default: throw std::invalid_argument("unknown design id " + std::to_string(design_id));
    }
  }
  return labels;
}

Eigen::MatrixXd fourier_truth_basis(const Eigen::VectorXd& grid) {
  const auto t = grid.size();
  Eigen::MatrixXd f(t, 3);
  for (Eigen::Index i = 0; i < t; ++i) {
    f(i, 0) = 1.0;
    f(i, 1) = std::sin(2.0 * std::numbers::pi * grid[i]);
    f(i, 2) = std::cos(2.0 * std::numbers::pi * grid[i]);
  }
  for (Eigen::Index j = 0; j < 3; ++j) {
    const double rms = std::sqrt(f.col(j).squaredNorm() / static_cast<double>(t));
    if (rms > 0.0) f.col(j) /= rms;
  }
  return f;
}

Eigen::MatrixXd exponential_covariance(const Eigen::VectorXd& grid, double lengthscale) {
  const auto t = grid.size();
  Eigen::MatrixXd s(t, t);
  for (Eigen::Index i = 0; i < t; ++i) {
    for (Eigen::Index j = 0; j < t; ++j) {
      const double d = grid[i] - grid[j];
      s(i, j) = std::exp(-lengthscale * d * d);
    }
  }
  return s;
}

double calibrate_noise(const Eigen::MatrixXd& signal, const Eigen::MatrixXd& sigma_prime,
                       double target_snr) {
  if (!(target_snr > 0.0)) throw std::invalid_argument("calibrate_noise: target SNR must be positive");
  const double mean = signal.mean();
  const double var = (signal.array() - mean).square().mean();
  if (!(var > 0.0)) throw std::invalid_argument("calibrate_noise: signal has zero variance");
  const double structured = sigma_prime.trace() / static_cast<double>(sigma_prime.rows());
  return std::max(var / target_snr - structured, 1e-8);
}

SimulatedData make_design(const SimulationSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const int n = spec.num_subjects;
  const int t = spec.grid_size;
  const int pf = spec.num_free;
  const int pc = spec.num_clusterable;

  SimulatedData out;
  auto& d = out.data;
  auto& truth = out.truth;
  d.grid = Eigen::VectorXd::LinSpaced(t, 0.0, 1.0);

  // X rows ~ N(0, rho^|p - p'|)
  Eigen::MatrixXd cov_x(pc, pc);
  for (int p = 0; p < pc; ++p) {
    for (int q = 0; q < pc; ++q) cov_x(p, q) = std::pow(spec.rho, std::abs(p - q));
  }
  const Eigen::MatrixXd lx = cov_x.llt().matrixL();
  d.X.resize(n, pc);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd z(pc);
    for (int p = 0; p < pc; ++p) z[p] = rng.normal();
    d.X.row(i) = (lx * z).transpose();
  }

  d.W.resize(n, pf);
  d.W.col(0).setOnes();
  for (int i = 0; i < n; ++i) {
    for (int p = 1; p < pf; ++p) d.W(i, p) = rng.normal();
  }

  const Eigen::MatrixXd fourier = fourier_truth_basis(d.grid);
  auto random_curve = [&] {
    Eigen::Vector3d coef(rng.normal(), rng.normal(), rng.normal());
    return Eigen::VectorXd(fourier * coef);
  };

  truth.labels_true = design_labels(spec.design_id, pc);
  const int k = *std::max_element(truth.labels_true.begin(), truth.labels_true.end());
  std::vector<Eigen::VectorXd> cluster_curves;
  for (int c = 0; c < k; ++c) cluster_curves.push_back(random_curve());
  truth.beta_true = Eigen::MatrixXd::Zero(t, pc);
  for (int p = 0; p < pc; ++p) {
    if (truth.labels_true[p] > 0) truth.beta_true.col(p) = cluster_curves[truth.labels_true[p] - 1];
  }

  truth.alpha_true = Eigen::MatrixXd::Zero(t, pf);  // intercept curve is zero
  for (int p = 1; p < pf; ++p) truth.alpha_true.col(p) = random_curve();

  const Eigen::MatrixXd signal = d.W * truth.alpha_true.transpose() + d.X * truth.beta_true.transpose();
  const Eigen::MatrixXd sigma_prime = exponential_covariance(d.grid, spec.lengthscale);
  truth.sigma2 = calibrate_noise(signal, sigma_prime, spec.target_snr);

  Eigen::MatrixXd noise_cov = sigma_prime;
  noise_cov.diagonal().array() += truth.sigma2;
  const Eigen::MatrixXd ln = noise_cov.llt().matrixL();
  d.Y.resize(n, t);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd z(t);
    for (int j = 0; j < t; ++j) z[j] = rng.normal();
    d.Y.row(i) = signal.row(i) + (ln * z).transpose();
  }

  d.free_names = {"intercept"};
  for (int p = 1; p < pf; ++p) d.free_names.push_back("w" + std::to_string(p));
  for (int p = 0; p < pc; ++p) d.cluster_names.push_back("x" + std::to_string(p + 1));
  d.validate();
  return out;
}

}  // namespace fosr
