#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fosr/basis.hpp"
#include "fosr/chain.hpp"
#include "fosr/cli.hpp"
#include "fosr/errors.hpp"
#include "fosr/evaluation.hpp"
#include "fosr/marginal.hpp"
#include "fosr/model.hpp"
#include "fosr/simulation.hpp"
#include "fosr/study.hpp"

namespace py = pybind11;
using namespace fosr;

namespace {

FunctionalDataset make_dataset(Eigen::MatrixXd y, Eigen::MatrixXd w, Eigen::MatrixXd x,
                               Eigen::VectorXd grid) {
  FunctionalDataset d;
  d.Y = std::move(y);
  d.W = std::move(w);
  d.X = std::move(x);
  d.grid = std::move(grid);
  d.validate();
  return d;
}

py::dict dataset_dict(const FunctionalDataset& d) {
  py::dict out;
  out["Y"] = d.Y;
  out["W"] = d.W;
  out["X"] = d.X;
  out["grid"] = d.grid;
  out["free_names"] = d.free_names;
  out["cluster_names"] = d.cluster_names;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bayesian function-on-scalar regression with clustering priors";

  py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<ChainError>(m, "ChainError", PyExc_RuntimeError);

  py::enum_<Variant>(m, "Variant")
      .value("FOSR", Variant::kFosr)
      .value("FOSR_PM", Variant::kFosrPm)
      .value("FOSR_DP", Variant::kFosrDp)
      .value("FOSR_DPPM", Variant::kFosrDppm);
  m.def("parse_variant", [](const std::string& s) { return parse_variant(s); });

  py::class_<GammaPrior>(m, "GammaPrior")
      .def(py::init<double, double>(), py::arg("shape"), py::arg("rate"))
      .def_readwrite("shape", &GammaPrior::shape)
      .def_readwrite("rate", &GammaPrior::rate);

  py::class_<PriorConfig>(m, "PriorConfig")
      .def(py::init<>())
      .def_readwrite("variant", &PriorConfig::variant)
      .def_readwrite("lambda_", &PriorConfig::lambda)
      .def_readwrite("tau", &PriorConfig::tau)
      .def_readwrite("alpha", &PriorConfig::alpha)
      .def_readwrite("alpha0", &PriorConfig::alpha0)
      .def_readwrite("num_basis", &PriorConfig::num_basis)
      .def_readwrite("degree", &PriorConfig::degree)
      .def_readwrite("eta", &PriorConfig::eta)
      .def("validate", &PriorConfig::validate);

  py::class_<SimulationSpec>(m, "SimulationSpec")
      .def(py::init<>())
      .def_readwrite("design_id", &SimulationSpec::design_id)
      .def_readwrite("num_subjects", &SimulationSpec::num_subjects)
      .def_readwrite("grid_size", &SimulationSpec::grid_size)
      .def_readwrite("num_free", &SimulationSpec::num_free)
      .def_readwrite("num_clusterable", &SimulationSpec::num_clusterable)
      .def_readwrite("rho", &SimulationSpec::rho)
      .def_readwrite("lengthscale", &SimulationSpec::lengthscale)
      .def_readwrite("target_snr", &SimulationSpec::target_snr)
      .def_readwrite("seed", &SimulationSpec::seed);

  m.def(
      "make_design",
      [](const SimulationSpec& spec) {
        const SimulatedData sim = make_design(spec);
        py::dict out = dataset_dict(sim.data);
        out["beta_true"] = sim.truth.beta_true;
        out["alpha_true"] = sim.truth.alpha_true;
        out["labels_true"] = sim.truth.labels_true;
        out["sigma2"] = sim.truth.sigma2;
        return out;
      },
      py::arg("spec"), "Simulated dataset and truth as a dict of arrays.");

  m.def("bspline_design", &bspline_design, py::arg("grid"), py::arg("num_basis"), py::arg("degree") = 3);
  m.def("pspline_penalty", &pspline_penalty, py::arg("num_basis"), py::arg("eta") = 0.001);

  m.def(
      "marginal_loglik",
      [](const Eigen::MatrixXd& y, const Eigen::MatrixXd& w, const Eigen::MatrixXd& x,
         const Eigen::VectorXd& grid, const Eigen::MatrixXd& a, std::vector<int> labels,
         Eigen::VectorXd lambda, double tau, int num_basis, double eta) {
        const FunctionalDataset d = make_dataset(y, w, x, grid);
        const BasisSystem basis = make_basis(d.grid, num_basis, 3, eta);
        const Eigen::MatrixXd resid = free_residual_matrix(d.Y, basis.theta, a, d.W);
        return marginal_loglik(labels, lambda, tau, basis, cluster_suff_stats(d.X, basis, resid));
      },
      py::arg("Y"), py::arg("W"), py::arg("X"), py::arg("grid"), py::arg("A"), py::arg("labels"),
      py::arg("lambda_"), py::arg("tau"), py::arg("num_basis") = 8, py::arg("eta") = 0.001,
      "Log marginal likelihood of a labeling with cluster coefficients integrated out.");

  py::class_<ChainOutput>(m, "ChainOutput")
      .def_property_readonly("variant", [](const ChainOutput& c) { return c.variant; })
      .def_readonly("seed", &ChainOutput::seed)
      .def_readonly("iterations", &ChainOutput::iterations)
      .def_readonly("burn_in", &ChainOutput::burn_in)
      .def_readonly("beta_draws", &ChainOutput::beta_draws)
      .def_readonly("free_draws", &ChainOutput::free_draws)
      .def_readonly("labels", &ChainOutput::labels)
      .def_readonly("tau", &ChainOutput::tau)
      .def_readonly("alpha", &ChainOutput::alpha)
      .def_readonly("num_clusters", &ChainOutput::num_clusters)
      .def_readonly("lambda_a", &ChainOutput::lambda_a)
      .def_readonly("lambda_b", &ChainOutput::lambda_b)
      .def_property_readonly("stored", &ChainOutput::stored)
      .def("beta_curve_draws", &ChainOutput::beta_curve_draws)
      .def("free_curve_draws", &ChainOutput::free_curve_draws)
      .def("posterior_mean_beta", &ChainOutput::posterior_mean_beta)
      .def("posterior_mean_free", &ChainOutput::posterior_mean_free);

  m.def(
      "run_chain",
      [](Eigen::MatrixXd y, Eigen::MatrixXd w, Eigen::MatrixXd x, Eigen::VectorXd grid,
         const PriorConfig& prior, long iterations, long burn_in, std::uint64_t seed) {
        const FunctionalDataset d = make_dataset(std::move(y), std::move(w), std::move(x), std::move(grid));
        py::gil_scoped_release release;
        return run_chain(d, prior, iterations, burn_in, seed);
      },
      py::arg("Y"), py::arg("W"), py::arg("X"), py::arg("grid"), py::arg("prior"),
      py::arg("iterations") = 5000, py::arg("burn_in") = 2500, py::arg("seed") = 1,
      "Run one Gibbs chain. W must include the intercept column if one is wanted.");

  m.def("pointwise_mse", &pointwise_mse);
  m.def("rand_index", [](std::vector<int> a, std::vector<int> b) { return rand_index(a, b); });
  m.def("adjusted_rand_index", [](std::vector<int> a, std::vector<int> b) { return adjusted_rand_index(a, b); });
  m.def("coclustering_matrix", &coclustering_matrix);
  m.def("least_squares_draw", &least_squares_draw);
  m.def("percent_zero", &percent_zero);
  m.def("select_nonzero", &select_nonzero, py::arg("percent_zero"), py::arg("cutoff") = 0.05);
  m.def("quantile", &quantile);
  m.def("bootstrap_se", [](std::vector<double> v, int reps, std::uint64_t seed) { return bootstrap_se(v, reps, seed); },
        py::arg("values"), py::arg("reps") = 100, py::arg("seed") = 1);
  m.def(
      "dendrogram",
      [](const Eigen::MatrixXd& cc) {
        const auto merges = dendrogram(cc);
        Eigen::MatrixXd out(merges.size(), 4);
        for (std::size_t s = 0; s < merges.size(); ++s) {
          out.row(s) << merges[s].left, merges[s].right, merges[s].height, merges[s].size;
        }
        return out;
      },
      "Average-linkage merges as rows (left, right, height, size), scipy linkage layout.");
  m.def(
      "curve_summary",
      [](const Eigen::MatrixXd& draws) {
        const CurveSummary s = curve_summary(draws);
        return py::make_tuple(s.mean, s.lower, s.upper);
      },
      "(mean, 2.5% quantile, 97.5% quantile) per grid point.");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the fosr command line; returns (exit_code, stdout, stderr).");
}
