#include "fosr/chain.hpp"

#include <chrono>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "fosr/basis.hpp"
#include "fosr/csv_io.hpp"
#include "fosr/errors.hpp"
#include "fosr/random.hpp"
#include "fosr/sampler.hpp"

namespace fosr {

Eigen::MatrixXd ChainOutput::beta_curve_draws(Eigen::Index predictor) const {
  return beta_draws.middleCols(predictor * grid_size, grid_size);
}

Eigen::MatrixXd ChainOutput::free_curve_draws(Eigen::Index predictor) const {
  return free_draws.middleCols(predictor * grid_size, grid_size);
}

Eigen::MatrixXd ChainOutput::posterior_mean_beta() const {
  const Eigen::VectorXd mean = beta_draws.colwise().mean().transpose();
  return Eigen::Map<const Eigen::MatrixXd>(mean.data(), grid_size, num_clusterable);
}

Eigen::MatrixXd ChainOutput::posterior_mean_free() const {
  const Eigen::VectorXd mean = free_draws.colwise().mean().transpose();
  return Eigen::Map<const Eigen::MatrixXd>(mean.data(), grid_size, num_free);
}

ChainOutput run_chain(const FunctionalDataset& data, const PriorConfig& prior, long iterations,
                      long burn_in, std::uint64_t seed, const ProgressCallback& progress) {
  if (burn_in < 0 || iterations <= burn_in) {
    throw std::invalid_argument("run_chain: need iterations > burn_in >= 0");
  }
  prior.validate();
  const auto start = std::chrono::steady_clock::now();

  const BasisSystem basis = make_basis(data.grid, prior.num_basis, prior.degree, prior.eta);
  const SamplerContext ctx{data, basis, prior};
  Rng rng(seed);
  ModelState state = initial_state(ctx);

  ChainOutput out;
  out.variant = prior.variant;
  out.seed = seed;
  out.iterations = iterations;
  out.burn_in = burn_in;
  out.grid_size = data.grid_size();
  out.num_free = data.num_free();
  out.num_clusterable = data.num_clusterable();
  const Eigen::Index stored = iterations - burn_in;
  const auto t = out.grid_size;
  const auto pc = out.num_clusterable;
  const auto pf = out.num_free;
  out.beta_draws.resize(stored, t * pc);
  out.free_draws.resize(stored, t * pf);
  out.labels.resize(stored, pc);
  out.tau.resize(stored);
  out.alpha.resize(stored);
  out.num_clusters.resize(stored);
  out.lambda_a.resize(stored, pf);
  out.lambda_b.resize(stored, pc);

  for (long it = 0; it < iterations; ++it) {
    try {
      gibbs_sweep(state, ctx, rng);
    } catch (const NumericalError& e) {
      throw ChainError(it + 1, e.what());
    }
    if (it >= burn_in) {
      const Eigen::Index s = it - burn_in;
      const Eigen::MatrixXd beta = cluster_curves(basis.theta, state);
      const Eigen::MatrixXd free = basis.theta * state.A;
      out.beta_draws.row(s) = Eigen::Map<const Eigen::RowVectorXd>(beta.data(), beta.size());
      out.free_draws.row(s) = Eigen::Map<const Eigen::RowVectorXd>(free.data(), free.size());
      for (Eigen::Index p = 0; p < pc; ++p) {
        const int c = state.labels[p];
        out.labels(s, p) = c;
        out.lambda_b(s, p) = c > 0 ? state.lambda_b[c - 1] : 0.0;
      }
      out.tau[s] = state.tau;
      out.alpha[s] = state.alpha;
      out.num_clusters[s] = state.num_clusters();
      out.lambda_a.row(s) = state.lambda_a.transpose();
    }
    if (progress) progress(it + 1);
  }
  out.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<std::string> write_chain(const ChainOutput& chain, const FunctionalDataset& data,
                                     const PriorConfig& prior, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> files;
  auto emit = [&](const std::string& name, const std::vector<std::string>& header,
                  const Eigen::MatrixXd& values) {
    write_csv(dir / name, header, values);
    files.push_back(name);
  };

  auto curve_header = [&](const std::vector<std::string>& names) {
    std::vector<std::string> h;
    for (const auto& n : names) {
      for (Eigen::Index t = 0; t < chain.grid_size; ++t) h.push_back(n + "[" + std::to_string(t) + "]");
    }
    return h;
  };

  emit("tau.csv", {"tau"}, chain.tau);
  emit("lambda_a.csv", data.free_names, chain.lambda_a);
  emit("beta_draws.csv", curve_header(data.cluster_names), chain.beta_draws);
  emit("free_draws.csv", curve_header(data.free_names), chain.free_draws);
  emit("lambda_b.csv", data.cluster_names, chain.lambda_b);
  if (has_labels(chain.variant)) {
    emit("labels.csv", data.cluster_names, chain.labels.cast<double>());
    emit("num_clusters.csv", {"num_clusters"}, chain.num_clusters.cast<double>());
  }
  if (has_concentration(chain.variant)) emit("alpha.csv", {"alpha"}, chain.alpha);

  nlohmann::ordered_json meta;
  meta["variant"] = std::string(to_string(chain.variant));
  meta["seed"] = chain.seed;
  meta["iterations"] = chain.iterations;
  meta["burn_in"] = chain.burn_in;
  meta["stored_draws"] = chain.stored();
  meta["subjects"] = data.num_subjects();
  meta["grid_size"] = chain.grid_size;
  meta["free_predictors"] = data.free_names;
  meta["clusterable_predictors"] = data.cluster_names;
  meta["hyperparameters"] = {
      {"num_basis", prior.num_basis},
      {"degree", prior.degree},
      {"eta", prior.eta},
      {"a_lambda", prior.lambda.shape},
      {"b_lambda", prior.lambda.rate},
      {"a_tau", prior.tau.shape},
      {"b_tau", prior.tau.rate},
      {"a_alpha", prior.alpha.shape},
      {"b_alpha", prior.alpha.rate},
      {"alpha0", prior.alpha0},
  };
  meta["curve_column_order"] = "predictor-major: column p*T + t";
  std::ofstream(dir / "metadata.json") << meta.dump(2) << '\n';
  files.push_back("metadata.json");

  // wall-clock numbers live apart from metadata so reruns stay byte-identical
  nlohmann::ordered_json timing;
  timing["elapsed_seconds"] = chain.elapsed_seconds;
  timing["seconds_per_iteration"] = chain.elapsed_seconds / static_cast<double>(chain.iterations);
  std::ofstream(dir / "timings.json") << timing.dump(2) << '\n';
  files.push_back("timings.json");
  return files;
}

}  // namespace fosr
