#include "fosr/study.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "fosr/csv_io.hpp"
#include "fosr/random.hpp"

namespace fosr {
namespace {

std::string cell_value(double v) {
  if (std::isnan(v)) return "NA";
  return format_double(v);
}

double mean_over(const Eigen::VectorXd& values, const std::vector<int>& labels, bool zero) {
  double sum = 0.0;
  int count = 0;
  for (Eigen::Index p = 0; p < values.size(); ++p) {
    if ((labels[p] == 0) == zero) {
      sum += values[p];
      ++count;
    }
  }
  return count ? sum / count : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

void StudyConfig::validate() const {
  if (designs.empty() || sample_sizes.empty() || variants.empty()) {
    throw std::invalid_argument("study needs at least one design, sample size and variant");
  }
  if (replicates < 2) throw std::invalid_argument("study needs at least 2 replicates per cell");
  if (burn_in < 0 || iterations <= burn_in) throw std::invalid_argument("need iterations > burn-in >= 0");
  if (workers < 1) throw std::invalid_argument("worker count must be at least 1");
  if (bootstrap_reps < 2) throw std::invalid_argument("need at least 2 bootstrap repetitions");
  for (int d : designs) {
    SimulationSpec s = simulation;
    s.design_id = d;
    s.validate();
  }
  for (int n : sample_sizes) {
    if (n < 2) throw std::invalid_argument("sample sizes must be at least 2");
  }
  prior.validate();
}

EvaluationReport evaluate_chain(const ChainOutput& chain, const SimulatedTruth& truth) {
  EvaluationReport r;
  r.variant = std::string(to_string(chain.variant));
  r.pointwise_mse = pointwise_mse(chain.posterior_mean_beta(), truth.beta_true);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.rand = nan;
  r.adjusted_rand = nan;
  if (clusters_predictors(chain.variant)) {
    r.coclustering = coclustering_matrix(chain.labels);
    const Eigen::Index best = least_squares_draw(chain.labels, r.coclustering);
    std::vector<int> estimate(chain.labels.cols());
    for (Eigen::Index p = 0; p < chain.labels.cols(); ++p) estimate[p] = chain.labels(best, p);
    r.rand = rand_index(estimate, truth.labels_true);
    r.adjusted_rand = adjusted_rand_index(estimate, truth.labels_true);
  }
  if (has_null_cluster(chain.variant)) r.percent_zero = percent_zero(chain.labels);
  return r;
}

std::uint64_t replicate_seed(std::uint64_t master, int design, int n, int rep) {
  return derive_seed(master, {static_cast<std::uint64_t>(design), static_cast<std::uint64_t>(n),
                              static_cast<std::uint64_t>(rep)});
}

std::uint64_t chain_seed(std::uint64_t master, int design, int n, int rep, Variant v) {
  return derive_seed(replicate_seed(master, design, n, rep),
                     {0xC4A1ULL, static_cast<std::uint64_t>(v)});
}

StudyResult run_study(const StudyConfig& config, const StudyProgress& progress) {
  config.validate();
  struct Task {
    int design, n, rep;
  };
  std::vector<Task> tasks;
  for (int d : config.designs) {
    for (int n : config.sample_sizes) {
      for (int r = 0; r < config.replicates; ++r) tasks.push_back({d, n, r});
    }
  }
  const auto nv = config.variants.size();
  StudyResult result;
  result.reports.resize(tasks.size() * nv);
  result.truth_labels.resize(tasks.size() * nv);

  std::atomic<std::size_t> next{0};
  std::atomic<int> done{0};
  std::mutex progress_mutex;
  const int total = static_cast<int>(tasks.size() * nv);

  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Task& task = tasks[i];
      SimulationSpec spec = config.simulation;
      spec.design_id = task.design;
      spec.num_subjects = task.n;
      spec.seed = replicate_seed(config.seed, task.design, task.n, task.rep);
      SimulatedData sim;
      std::string data_error;
      try {
        sim = make_design(spec);
      } catch (const std::exception& e) {
        data_error = e.what();
      }
      for (std::size_t v = 0; v < nv; ++v) {
        EvaluationReport report;
        const Variant variant = config.variants[v];
        try {
          if (!data_error.empty()) throw std::runtime_error(data_error);
          PriorConfig prior = config.prior;
          prior.variant = variant;
          const ChainOutput chain =
              run_chain(sim.data, prior, config.iterations, config.burn_in,
                        chain_seed(config.seed, task.design, task.n, task.rep, variant));
          report = evaluate_chain(chain, sim.truth);
        } catch (const std::exception& e) {
          report.ok = false;
          report.error = e.what();
          report.pointwise_mse = report.rand = report.adjusted_rand =
              std::numeric_limits<double>::quiet_NaN();
        }
        report.variant = std::string(to_string(variant));
        report.design_id = task.design;
        report.num_subjects = task.n;
        report.replicate_id = task.rep;
        result.reports[i * nv + v] = std::move(report);
        result.truth_labels[i * nv + v] = sim.truth.labels_true;
        const int finished = ++done;
        if (progress) {
          std::lock_guard lock(progress_mutex);
          progress(finished, total);
        }
      }
    }
  };

  const int nthreads = std::max(1, std::min<int>(config.workers, static_cast<int>(tasks.size())));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }

  std::vector<std::string> names;
  for (Variant v : config.variants) names.emplace_back(to_string(v));
  result.cells = aggregate_study(result.reports, names, config.bootstrap_reps,
                                 derive_seed(config.seed, {0xB007ULL}));
  return result;
}

std::vector<std::string> write_study(const StudyResult& result, const StudyConfig& config,
                                     const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> files;

  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    const auto& r = result.reports[i];
    const auto& labels = result.truth_labels[i];
    double pz_zero = std::numeric_limits<double>::quiet_NaN();
    double pz_nonzero = pz_zero;
    if (r.ok && r.percent_zero.size() > 0 && !labels.empty()) {
      pz_zero = mean_over(r.percent_zero, labels, true);
      pz_nonzero = mean_over(r.percent_zero, labels, false);
    }
    std::string error = r.error;
    for (char& c : error) {
      if (c == ',' || c == '\n') c = ';';
    }
    rows.push_back({std::to_string(r.design_id), std::to_string(r.num_subjects), r.variant,
                    std::to_string(r.replicate_id),
                    std::to_string(replicate_seed(config.seed, r.design_id, r.num_subjects, r.replicate_id)),
                    r.ok ? "ok" : "failed", cell_value(r.pointwise_mse), cell_value(r.rand),
                    cell_value(r.adjusted_rand), cell_value(pz_zero), cell_value(pz_nonzero), error});
  }
  write_text_csv(dir / "replicates.csv",
                 {"design", "N", "variant", "replicate", "dataset_seed", "status", "mse", "rand",
                  "ari", "percent_zero_true_zero", "percent_zero_true_nonzero", "error"},
                 rows);
  files.push_back("replicates.csv");

  // wide tables: one row per (design, variant), mean and SE per N
  auto table = [&](const std::string& name, bool clustering_only, auto mean_of, auto se_of) {
    std::vector<std::string> header{"design", "variant"};
    for (int n : config.sample_sizes) {
      header.push_back("N" + std::to_string(n) + "_mean");
      header.push_back("N" + std::to_string(n) + "_se");
      header.push_back("N" + std::to_string(n) + "_status");
    }
    std::vector<std::vector<std::string>> out;
    for (int d : config.designs) {
      for (Variant v : config.variants) {
        if (clustering_only && !clusters_predictors(v)) continue;
        std::vector<std::string> row{std::to_string(d), std::string(to_string(v))};
        for (int n : config.sample_sizes) {
          const CellSummary* cell = nullptr;
          for (const auto& c : result.cells) {
            if (c.design_id == d && c.num_subjects == n && c.variant == to_string(v)) cell = &c;
          }
          if (cell == nullptr) {
            row.insert(row.end(), {"NA", "NA", "incomplete"});
            continue;
          }
          row.push_back(cell_value(mean_of(*cell)));
          row.push_back(cell_value(se_of(*cell)));
          row.push_back(cell->complete() ? "complete" : "incomplete");
        }
        out.push_back(std::move(row));
      }
    }
    write_text_csv(dir / name, header, out);
    files.push_back(name);
  };
  table("mse_summary.csv", false, [](const CellSummary& c) { return c.mse_mean; },
        [](const CellSummary& c) { return c.mse_se; });
  table("rand_summary.csv", true, [](const CellSummary& c) { return c.rand_mean; },
        [](const CellSummary& c) { return c.rand_se; });
  table("ari_summary.csv", true, [](const CellSummary& c) { return c.ari_mean; },
        [](const CellSummary& c) { return c.ari_se; });

  nlohmann::ordered_json meta;
  meta["seed"] = config.seed;
  meta["designs"] = config.designs;
  meta["sample_sizes"] = config.sample_sizes;
  std::vector<std::string> names;
  for (Variant v : config.variants) names.emplace_back(to_string(v));
  meta["variants"] = names;
  meta["replicates"] = config.replicates;
  meta["iterations"] = config.iterations;
  meta["burn_in"] = config.burn_in;
  meta["bootstrap_reps"] = config.bootstrap_reps;
  meta["num_basis"] = config.prior.num_basis;
  meta["eta"] = config.prior.eta;
  int failed = 0;
  for (const auto& r : result.reports) failed += r.ok ? 0 : 1;
  meta["failed_fits"] = failed;
  std::ofstream(dir / "study.json") << meta.dump(2) << '\n';
  files.push_back("study.json");
  return files;
}

}  // namespace fosr
