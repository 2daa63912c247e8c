#include <doctest.h>

#include "../common/instances.hpp"
#include "../common/oracles.hpp"
#include "fosr/errors.hpp"
#include "fosr/marginal.hpp"

using namespace fosr;

namespace {

double suffstat_route(const testing::MarginalInstance& inst) {
  const Eigen::MatrixXd resid = free_residual_matrix(inst.data.Y, inst.basis.theta, inst.a, inst.data.W);
  const ClusterSuffStats stats = cluster_suff_stats(inst.data.X, inst.basis, resid);
  return marginal_loglik(inst.labels, inst.lambda, inst.tau, inst.basis, stats);
}

double dense_route(const testing::MarginalInstance& inst) {
  LabelUpdateWorkspace ws;
  ws.labels = inst.labels;
  ws.lambda = inst.lambda;
  assemble_candidate_dense(ws, inst.data, inst.basis, inst.a, inst.tau);
  return marginal_loglik(ws, inst.tau, inst.basis);
}

double oracle_value(const testing::MarginalInstance& inst) {
  const Eigen::VectorXd e = oracle::free_residual(inst.data.Y, inst.data.W, inst.basis.theta, inst.a);
  const int k = static_cast<int>(inst.lambda.size());
  const Eigen::MatrixXd d = oracle::clustered_design(inst.data.X, inst.labels, k, inst.basis.theta);
  return oracle::dense_marginal(e, d, inst.lambda, inst.basis.penalty, inst.tau);
}

}  // namespace

TEST_CASE("smallest scalar-block case matches the dense Gaussian density") {
  // N=3, T=2, M=2, one cluster
  testing::MarginalInstance inst;
  auto& d = inst.data;
  d.grid = Eigen::Vector2d(0.0, 1.0);
  d.Y.resize(3, 2);
  d.Y << 0.3, -1.2, 2.0, 0.7, -0.4, 1.1;
  d.W = Eigen::MatrixXd::Ones(3, 1);
  d.X.resize(3, 2);
  d.X << 1.0, -0.5, 0.2, 0.9, -1.3, 0.4;
  d.validate();
  inst.basis.grid = d.grid;
  inst.basis.theta.resize(2, 2);
  inst.basis.theta << 1.0, 0.0, 0.4, 0.6;
  inst.basis.penalty.resize(2, 2);
  inst.basis.penalty << 1.2, -0.3, -0.3, 0.8;
  inst.basis.theta_gram = inst.basis.theta.transpose() * inst.basis.theta;
  inst.basis.penalty_logdet = std::log(inst.basis.penalty.determinant());
  inst.a = Eigen::Vector2d(0.1, -0.2);
  inst.labels = {1, 1};
  inst.lambda = Eigen::VectorXd::Constant(1, 0.7);
  inst.tau = 1.5;
  const double ref = oracle_value(inst);
  CHECK(suffstat_route(inst) == doctest::Approx(ref).epsilon(1e-10));
  CHECK(dense_route(inst) == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("both evaluation routes agree with the dense oracle on random instances") {
  std::mt19937_64 gen(2024);
  for (int rep = 0; rep < 40; ++rep) {
    const auto inst = testing::random_marginal_instance(gen);
    const double ref = oracle_value(inst);
    CAPTURE(rep);
    CHECK(std::abs(suffstat_route(inst) - ref) <= 1e-8 * std::abs(ref));
    CHECK(std::abs(dense_route(inst) - ref) <= 1e-8 * std::abs(ref));
  }
}

TEST_CASE("all-null labeling reduces to white noise") {
  std::mt19937_64 gen(5);
  auto inst = testing::random_marginal_instance(gen);
  std::fill(inst.labels.begin(), inst.labels.end(), 0);
  inst.lambda.resize(0);
  const Eigen::VectorXd e = oracle::free_residual(inst.data.Y, inst.data.W, inst.basis.theta, inst.a);
  const double n = static_cast<double>(e.size());
  const double expected = -0.5 * n * std::log(2 * std::numbers::pi) + 0.5 * n * std::log(inst.tau) -
                          0.5 * inst.tau * e.squaredNorm();
  CHECK(suffstat_route(inst) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("non-positive-definite G is reported") {
  std::mt19937_64 gen(9);
  const auto inst = testing::random_marginal_instance(gen);
  LabelUpdateWorkspace ws;
  ws.labels = inst.labels;
  ws.lambda = inst.lambda;
  assemble_candidate_dense(ws, inst.data, inst.basis, inst.a, inst.tau);
  ws.G = -Eigen::MatrixXd::Identity(ws.G.rows(), ws.G.cols());
  CHECK_THROWS_AS(marginal_loglik(ws, inst.tau, inst.basis), NumericalError);
}
