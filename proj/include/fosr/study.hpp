#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "fosr/chain.hpp"
#include "fosr/evaluation.hpp"
#include "fosr/model.hpp"
#include "fosr/simulation.hpp"

namespace fosr {

/// Grid of simulation cells (design x N x variant) with replicate datasets
/// shared across variants.
struct StudyConfig {
  std::vector<int> designs{1, 2, 3, 4};
  std::vector<int> sample_sizes{30, 60, 120, 240};
  std::vector<Variant> variants{Variant::kFosr, Variant::kFosrPm, Variant::kFosrDp,
                                Variant::kFosrDppm};
  int replicates = 20;
  long iterations = 5000;
  long burn_in = 2500;
  std::uint64_t seed = 1;
  int workers = 1;
  int bootstrap_reps = 100;
  PriorConfig prior;          // variant is overridden per cell
  SimulationSpec simulation;  // design, N and seed are overridden per replicate

  void validate() const;
};

struct StudyResult {
  std::vector<EvaluationReport> reports;  // ordered by design, N, replicate, variant
  std::vector<CellSummary> cells;
  std::vector<std::vector<int>> truth_labels;  // per report
};

/// Scores one chain against the simulation truth: MSE of posterior-mean
/// curves, RAND/ARI of the least-squares partition (clustering variants only;
/// NaN otherwise), and percent-zero (null-cluster variants only).
EvaluationReport evaluate_chain(const ChainOutput& chain, const SimulatedTruth& truth);

/// Seed of replicate `rep` of a (design, N) cell; every variant sees the same dataset.
std::uint64_t replicate_seed(std::uint64_t master, int design, int n, int rep);
std::uint64_t chain_seed(std::uint64_t master, int design, int n, int rep, Variant v);

using StudyProgress = std::function<void(int done, int total)>;

/// Runs every replicate on a pool of `config.workers` threads. Results do not
/// depend on the worker count. A failing fit is recorded in its report and the
/// cell is marked incomplete.
StudyResult run_study(const StudyConfig& config, const StudyProgress& progress = {});

/// Writes replicates.csv, mse_summary.csv, rand_summary.csv, ari_summary.csv
/// and study.json. Returns the file names.
std::vector<std::string> write_study(const StudyResult& result, const StudyConfig& config,
                                     const std::filesystem::path& dir);

}  // namespace fosr
