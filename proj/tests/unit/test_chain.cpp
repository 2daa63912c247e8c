#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fosr/basis.hpp"
#include "fosr/chain.hpp"
#include "fosr/errors.hpp"
#include "fosr/random.hpp"
#include "fosr/simulation.hpp"

using namespace fosr;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

FunctionalDataset small_design(std::uint64_t seed) {
  SimulationSpec spec;
  spec.num_subjects = 20;
  spec.grid_size = 8;
  spec.num_free = 2;
  spec.num_clusterable = 5;
  spec.seed = seed;
  return make_design(spec).data;
}

}  // namespace

TEST_CASE("stored draw count and shapes") {
  const FunctionalDataset data = small_design(1);
  PriorConfig prior;
  prior.variant = Variant::kFosrDppm;
  const ChainOutput c = run_chain(data, prior, 5000, 2500, 3);
  CHECK(c.stored() == 2500);
  CHECK(c.beta_draws.rows() == 2500);
  CHECK(c.beta_draws.cols() == 8 * 5);
  CHECK(c.free_draws.cols() == 8 * 2);
  CHECK(c.labels.cols() == 5);
  CHECK(c.posterior_mean_beta().rows() == 8);
  CHECK(c.posterior_mean_beta().cols() == 5);
  CHECK((c.num_clusters.array() >= 0).all());
  CHECK((c.tau.array() > 0).all());
  CHECK_THROWS_AS(run_chain(data, prior, 10, 10, 1), std::invalid_argument);
}

TEST_CASE("same seed gives identical chains") {
  const FunctionalDataset data = small_design(2);
  for (Variant v : {Variant::kFosr, Variant::kFosrPm, Variant::kFosrDp, Variant::kFosrDppm}) {
    PriorConfig prior;
    prior.variant = v;
    const ChainOutput a = run_chain(data, prior, 300, 100, 77);
    const ChainOutput b = run_chain(data, prior, 300, 100, 77);
    CHECK(a.beta_draws == b.beta_draws);
    CHECK(a.labels == b.labels);
    CHECK(a.tau == b.tau);
    const ChainOutput c = run_chain(data, prior, 300, 100, 78);
    CHECK(a.tau != c.tau);
  }
}

TEST_CASE("noiseless data in the spline span is recovered") {
  const int n = 60, t = 15, m = 8;
  Rng rng(4);
  FunctionalDataset data;
  data.grid = Eigen::VectorXd::LinSpaced(t, 0, 1);
  const BasisSystem basis = make_basis(data.grid, m);
  data.X.resize(n, 3);
  data.W.resize(n, 2);
  for (Eigen::Index i = 0; i < data.X.size(); ++i) data.X.data()[i] = rng.normal();
  data.W.col(0).setOnes();
  for (Eigen::Index i = 0; i < n; ++i) data.W(i, 1) = rng.normal();
  Eigen::MatrixXd b(m, 3), a(m, 2);
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = rng.normal();
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
  const Eigen::MatrixXd beta = basis.theta * b;
  data.Y = data.X * beta.transpose() + data.W * (basis.theta * a).transpose();
  data.validate();
  PriorConfig prior;
  prior.variant = Variant::kFosr;
  const ChainOutput c = run_chain(data, prior, 2000, 1000, 9);
  CHECK((c.posterior_mean_beta() - beta).cwiseAbs().maxCoeff() < 1e-2);
  CHECK((c.posterior_mean_free() - basis.theta * a).cwiseAbs().maxCoeff() < 1e-2);
}

TEST_CASE("chain files are written deterministically") {
  const FunctionalDataset data = small_design(5);
  PriorConfig prior;
  const auto dir = std::filesystem::temp_directory_path() / "fosr_chain_test";
  std::filesystem::remove_all(dir);
  const ChainOutput c = run_chain(data, prior, 200, 100, 1);
  const auto files = write_chain(c, data, prior, dir / "a");
  write_chain(run_chain(data, prior, 200, 100, 1), data, prior, dir / "b");
  for (const auto& f : files) {
    if (f == "timings.json") continue;
    CAPTURE(f);
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
  CHECK(std::find(files.begin(), files.end(), "alpha.csv") != files.end());
  std::filesystem::remove_all(dir);
}

TEST_CASE("chain errors carry the iteration") {
  const ChainError e(12, "G is not positive definite");
  CHECK(e.iteration() == 12);
  CHECK(std::string(e.what()).find("iteration 12") != std::string::npos);
}
