#include "fosr/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fosr/chain.hpp"
#include "fosr/csv_io.hpp"
#include "fosr/errors.hpp"
#include "fosr/evaluation.hpp"
#include "fosr/simulation.hpp"
#include "fosr/study.hpp"

namespace fosr {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// Expands `--config file.json` into ordinary flags placed ahead of the
// explicit ones, so the explicit flags take precedence (TakeLast policy).
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::optional<std::string> path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (!path) return args;

  std::ifstream in(*path);
  if (!in) throw std::runtime_error("cannot open config file " + *path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config file " + *path + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw std::runtime_error("config file " + *path + " must hold a JSON object");

  std::vector<std::string> out{args.front()};
  for (const auto& [key, value] : doc.items()) {
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) {
        if (!joined.empty()) joined += ",";
        joined += v.is_string() ? v.get<std::string>() : v.dump();
      }
      out.insert(out.end(), {flag, joined});
    } else if (value.is_string()) {
      out.insert(out.end(), {flag, value.get<std::string>()});
    } else {
      out.insert(out.end(), {flag, value.dump()});
    }
  }
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

void add_prior_options(CLI::App& cmd, PriorConfig& prior) {
  cmd.add_option("--M", prior.num_basis, "Number of B-spline basis functions")->capture_default_str();
  cmd.add_option("--degree", prior.degree, "Spline degree")->capture_default_str();
  cmd.add_option("--eta", prior.eta, "Identity weight in the penalty matrix")->capture_default_str();
  cmd.add_option("--a-lambda", prior.lambda.shape, "Gamma shape of smoothing precisions")->capture_default_str();
  cmd.add_option("--b-lambda", prior.lambda.rate, "Gamma rate of smoothing precisions")->capture_default_str();
  cmd.add_option("--a-tau", prior.tau.shape, "Gamma shape of the error precision")->capture_default_str();
  cmd.add_option("--b-tau", prior.tau.rate, "Gamma rate of the error precision")->capture_default_str();
  cmd.add_option("--a-alpha", prior.alpha.shape, "Gamma shape of the DP concentration")->capture_default_str();
  cmd.add_option("--b-alpha", prior.alpha.rate, "Gamma rate of the DP concentration")->capture_default_str();
  cmd.add_option("--alpha0", prior.alpha0, "Beta(alpha0/2, alpha0/2) prior on the null weight")->capture_default_str();
}

void add_simulation_options(CLI::App& cmd, SimulationSpec& spec) {
  cmd.add_option("--T", spec.grid_size, "Grid points per curve")->capture_default_str();
  cmd.add_option("--pf", spec.num_free, "Free-effect predictors including the intercept")->capture_default_str();
  cmd.add_option("--pc", spec.num_clusterable, "Clusterable predictors")->capture_default_str();
  cmd.add_option("--rho", spec.rho, "Predictor correlation base")->capture_default_str();
  cmd.add_option("--lengthscale", spec.lengthscale, "Rate of the exponential noise covariance")->capture_default_str();
  cmd.add_option("--snr", spec.target_snr, "Target signal-to-noise ratio")->capture_default_str();
}

std::vector<std::string> finish_manifest(const fs::path& dir, std::vector<std::string> files,
                                         std::ostream& out) {
  files.push_back("manifest.txt");
  std::ofstream manifest(dir / "manifest.txt");
  for (const auto& f : files) {
    manifest << f << '\n';
    out << (dir / f).string() << '\n';
  }
  return files;
}

void cmd_simulate(const SimulationSpec& spec, const fs::path& dir, std::ostream& out) {
  const SimulatedData sim = make_design(spec);
  std::vector<std::string> files = save_dataset(sim.data, dir);

  write_csv(dir / "beta_true.csv", sim.data.cluster_names, sim.truth.beta_true);
  write_csv(dir / "alpha_true.csv", sim.data.free_names, sim.truth.alpha_true);
  Eigen::MatrixXd labels(1, sim.truth.labels_true.size());
  for (std::size_t p = 0; p < sim.truth.labels_true.size(); ++p) labels(0, p) = sim.truth.labels_true[p];
  write_csv(dir / "labels_true.csv", sim.data.cluster_names, labels);

  json truth;
  truth["design"] = spec.design_id;
  truth["seed"] = spec.seed;
  truth["N"] = spec.num_subjects;
  truth["T"] = spec.grid_size;
  truth["P_f"] = spec.num_free;
  truth["P_c"] = spec.num_clusterable;
  truth["rho"] = spec.rho;
  truth["lengthscale"] = spec.lengthscale;
  truth["target_snr"] = spec.target_snr;
  truth["sigma2"] = sim.truth.sigma2;
  truth["labels_true"] = sim.truth.labels_true;
  std::ofstream(dir / "truth.json") << truth.dump(2) << '\n';
  files.insert(files.end(), {"beta_true.csv", "alpha_true.csv", "labels_true.csv", "truth.json"});
  finish_manifest(dir, files, out);
}

struct FitPaths {
  std::string data_dir, y, w, x, truth_dir, out_dir;
};

void write_curve_summaries(const ChainOutput& chain, const FunctionalDataset& data,
                           const fs::path& dir) {
  std::vector<std::vector<std::string>> rows;
  auto add = [&](const std::string& effect, const std::string& name, const Eigen::MatrixXd& draws) {
    const CurveSummary s = curve_summary(draws);
    for (Eigen::Index t = 0; t < draws.cols(); ++t) {
      rows.push_back({effect, name, std::to_string(t), format_double(data.grid[t]),
                      format_double(s.mean[t]), format_double(s.lower[t]), format_double(s.upper[t])});
    }
  };
  for (Eigen::Index p = 0; p < chain.num_clusterable; ++p) {
    add("clusterable", data.cluster_names[p], chain.beta_curve_draws(p));
  }
  for (Eigen::Index p = 0; p < chain.num_free; ++p) add("free", data.free_names[p], chain.free_curve_draws(p));
  write_text_csv(dir / "curve_summary.csv",
                 {"effect", "predictor", "t_index", "t", "mean", "lower_2.5", "upper_97.5"}, rows);
}

void cmd_fit(const FitPaths& paths, const PriorConfig& prior, long iterations, long burn_in,
             std::uint64_t seed, const LoadOptions& load, std::ostream& out, std::ostream& err) {
  fs::path y = paths.y, x = paths.x;
  std::optional<fs::path> w;
  if (!paths.w.empty()) w = paths.w;
  if (!paths.data_dir.empty()) {
    const fs::path d = paths.data_dir;
    if (y.empty()) y = d / "Y.csv";
    if (x.empty()) x = d / "X.csv";
    if (!w && fs::exists(d / "W.csv")) w = d / "W.csv";
  }
  if (y.empty() || x.empty()) throw SchemaError("fit needs --data DIR or both --y and --x");

  Standardization scaling;
  const FunctionalDataset data = load_dataset(y, w, x, load, &scaling);
  const ChainOutput chain = run_chain(data, prior, iterations, burn_in, seed);

  const fs::path dir = paths.out_dir;
  std::vector<std::string> files = write_chain(chain, data, prior, dir);

  if (chain.stored() >= 40) {
    write_curve_summaries(chain, data, dir);
    files.push_back("curve_summary.csv");
  } else {
    err << "note: fewer than 40 stored draws; curve_summary.csv not written\n";
  }

  std::optional<Eigen::MatrixXd> cocl;
  if (clusters_predictors(prior.variant)) {
    cocl = coclustering_matrix(chain.labels);
    write_csv(dir / "coclustering.csv", data.cluster_names, *cocl);
    std::vector<std::vector<std::string>> rows;
    for (const auto& m : dendrogram(*cocl)) {
      rows.push_back({std::to_string(m.step), std::to_string(m.left), std::to_string(m.right),
                      format_double(m.height), std::to_string(m.size)});
    }
    write_text_csv(dir / "dendrogram.csv", {"step", "left", "right", "height", "size"}, rows);
    const Eigen::Index best = least_squares_draw(chain.labels, *cocl);
    rows.clear();
    for (Eigen::Index p = 0; p < chain.num_clusterable; ++p) {
      rows.push_back({data.cluster_names[p], std::to_string(chain.labels(best, p))});
    }
    write_text_csv(dir / "partition.csv", {"predictor", "label"}, rows);
    files.insert(files.end(), {"coclustering.csv", "dendrogram.csv", "partition.csv"});
  }
  if (has_null_cluster(prior.variant)) {
    const Eigen::VectorXd pz = percent_zero(chain.labels);
    std::vector<std::vector<std::string>> rows;
    for (Eigen::Index p = 0; p < pz.size(); ++p) {
      rows.push_back({data.cluster_names[p], format_double(pz[p]), pz[p] < 0.05 ? "nonzero" : "zero"});
    }
    write_text_csv(dir / "percent_zero.csv", {"predictor", "percent_zero", "selection_5pct"}, rows);
    files.push_back("percent_zero.csv");
  }

  if (!paths.truth_dir.empty()) {
    const fs::path t = paths.truth_dir;
    const CsvTable beta = read_csv(t / "beta_true.csv");
    const CsvTable labels = read_csv(t / "labels_true.csv");
    if (beta.values.cols() != data.num_clusterable() || beta.values.rows() != data.grid_size() ||
        labels.values.cols() != data.num_clusterable() || labels.values.rows() != 1) {
      throw SchemaError("truth files in " + t.string() + " do not match the dataset dimensions");
    }
    SimulatedTruth truth;
    // curves are estimated on the standardized predictor scale
    truth.beta_true = beta.values * scaling.cluster_scale.asDiagonal();
    for (Eigen::Index p = 0; p < labels.values.cols(); ++p) {
      truth.labels_true.push_back(static_cast<int>(labels.values(0, p)));
    }
    const EvaluationReport r = evaluate_chain(chain, truth);
    json ev;
    ev["variant"] = r.variant;
    ev["pointwise_mse"] = r.pointwise_mse;
    if (clusters_predictors(prior.variant)) {
      ev["rand"] = r.rand;
      ev["adjusted_rand"] = r.adjusted_rand;
    }
    if (r.percent_zero.size() > 0) {
      ev["percent_zero"] = std::vector<double>(r.percent_zero.data(), r.percent_zero.data() + r.percent_zero.size());
    }
    std::ofstream(dir / "evaluation.json") << ev.dump(2) << '\n';
    files.push_back("evaluation.json");
  }
  finish_manifest(dir, files, out);
}

}  // namespace

int default_workers() {
  if (const char* env = std::getenv("FOSR_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian function-on-scalar regression with selection, clustering and smoothing priors",
               "fosr"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_path;

  // simulate
  SimulationSpec sim_spec;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "Generate a simulated dataset and its truth");
  simulate->add_option("--config", config_path, "JSON file with flag values");
  simulate->add_option("--design", sim_spec.design_id, "Design 1-4")->capture_default_str();
  simulate->add_option("--n", sim_spec.num_subjects, "Number of subjects")->capture_default_str();
  simulate->add_option("--seed", sim_spec.seed, "Random seed")->capture_default_str();
  add_simulation_options(*simulate, sim_spec);
  simulate->add_option("--out", sim_out, "Output directory")->required();

  // fit
  PriorConfig fit_prior;
  std::string fit_variant = "fosr-dp";
  long fit_iters = 5000, fit_burn = 2500;
  std::uint64_t fit_seed = 1;
  bool no_intercept = false, standardize = true;
  FitPaths paths;
  auto* fit = app.add_subcommand("fit", "Run one Gibbs chain on CSV data");
  fit->add_option("--config", config_path, "JSON file with flag values");
  fit->add_option("--data", paths.data_dir, "Directory holding Y.csv, X.csv and optionally W.csv");
  fit->add_option("--y", paths.y, "Response CSV (header = grid values)");
  fit->add_option("--x", paths.x, "Clusterable predictors CSV");
  fit->add_option("--w", paths.w, "Free-effect predictors CSV");
  fit->add_option("--truth", paths.truth_dir, "Directory with beta_true.csv/labels_true.csv to score against");
  fit->add_option("--variant", fit_variant, "fosr, fosr-pm, fosr-dp or fosr-dppm")->capture_default_str();
  fit->add_option("--iters", fit_iters, "Total Gibbs iterations")->capture_default_str();
  fit->add_option("--burnin", fit_burn, "Burn-in iterations")->capture_default_str();
  fit->add_option("--seed", fit_seed, "Random seed")->capture_default_str();
  fit->add_flag("--no-intercept", no_intercept, "Do not prepend an intercept column to W");
  fit->add_flag("--standardize,!--no-standardize", standardize, "Center and scale predictor columns (default on)");
  add_prior_options(*fit, fit_prior);
  fit->add_option("--out", paths.out_dir, "Output directory")->required();

  // study
  StudyConfig study;
  study.workers = default_workers();
  std::vector<std::string> study_variants{"fosr", "fosr-pm", "fosr-dp", "fosr-dppm"};
  std::string study_out;
  auto* st = app.add_subcommand("study", "Simulation study over designs, sample sizes and variants");
  st->add_option("--config", config_path, "JSON file with flag values");
  st->add_option("--designs", study.designs, "Designs, comma separated")->delimiter(',')->capture_default_str();
  st->add_option("--ns", study.sample_sizes, "Sample sizes, comma separated")->delimiter(',')->capture_default_str();
  st->add_option("--variants", study_variants, "Variants, comma separated")->delimiter(',')->capture_default_str();
  st->add_option("--replicates", study.replicates, "Replicates per cell")->capture_default_str();
  st->add_option("--iters", study.iterations, "Total Gibbs iterations")->capture_default_str();
  st->add_option("--burnin", study.burn_in, "Burn-in iterations")->capture_default_str();
  st->add_option("--seed", study.seed, "Master seed")->capture_default_str();
  st->add_option("--workers", study.workers, "Worker threads (default $FOSR_WORKERS or 1)")->capture_default_str();
  st->add_option("--bootstrap", study.bootstrap_reps, "Bootstrap repetitions for standard errors")->capture_default_str();
  add_prior_options(*st, study.prior);
  add_simulation_options(*st, study.simulation);
  st->add_option("--out", study_out, "Output directory")->required();

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*simulate) {
      cmd_simulate(sim_spec, sim_out, out);
    } else if (*fit) {
      fit_prior.variant = parse_variant(fit_variant);
      fit_prior.validate();
      LoadOptions load;
      load.add_intercept = !no_intercept;
      load.standardize = standardize;
      cmd_fit(paths, fit_prior, fit_iters, fit_burn, fit_seed, load, out, err);
    } else if (*st) {
      study.variants.clear();
      for (const auto& v : study_variants) study.variants.push_back(parse_variant(v));
      const fs::path dir = study_out;
      const StudyResult result = run_study(study, [&err](int done, int total) {
        err << "\rfits " << done << "/" << total << std::flush;
        if (done == total) err << '\n';
      });
      auto files = write_study(result, study, dir);
      finish_manifest(dir, files, out);
      int failed = 0;
      for (const auto& r : result.reports) failed += r.ok ? 0 : 1;
      if (failed > 0) err << "note: " << failed << " fits failed; affected cells are marked incomplete\n";
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace fosr
