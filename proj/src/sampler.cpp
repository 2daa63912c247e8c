#include "fosr/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fosr/errors.hpp"

namespace fosr {
namespace {

// Precision tau * (gram kron basis_gram) + diag(lambda) kron R for an M x P block.
Eigen::MatrixXd kron_precision(const Eigen::MatrixXd& gram, const Eigen::MatrixXd& basis_gram,
                               const Eigen::VectorXd& lambda, const Eigen::MatrixXd& penalty,
                               double tau) {
  const auto m = basis_gram.rows();
  const auto p = gram.rows();
  Eigen::MatrixXd out(m * p, m * p);
  for (Eigen::Index a = 0; a < p; ++a) {
    for (Eigen::Index b = 0; b < p; ++b) out.block(a * m, b * m, m, m) = (tau * gram(a, b)) * basis_gram;
    out.block(a * m, a * m, m, m) += lambda[a] * penalty;
  }
  return out;
}

GaussianConditional solve_conditional(Eigen::MatrixXd precision, const Eigen::VectorXd& rhs) {
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("coefficient precision matrix is not positive definite");
  }
  GaussianConditional out;
  out.mean = llt.solve(rhs);
  out.precision = std::move(precision);
  return out;
}

Eigen::MatrixXd draw_penalized_columns(const BasisSystem& basis, const Eigen::VectorXd& lambda,
                                       Rng& rng) {
  // columns ~ N(0, (lambda_j R)^{-1}); with R = L L', x = L^{-T} z / sqrt(lambda_j)
  const auto m = basis.num_basis();
  Eigen::LLT<Eigen::MatrixXd> llt(basis.penalty);
  Eigen::MatrixXd out(m, lambda.size());
  for (Eigen::Index j = 0; j < lambda.size(); ++j) {
    Eigen::VectorXd z(m);
    for (Eigen::Index i = 0; i < m; ++i) z[i] = rng.normal();
    out.col(j) = llt.matrixU().solve(z) / std::sqrt(lambda[j]);
  }
  return out;
}

ClusterSuffStats sweep_stats(const ModelState& state, const SamplerContext& ctx) {
  const Eigen::MatrixXd e =
      free_residual_matrix(ctx.data.Y, ctx.basis.theta, state.A, ctx.data.W);
  return cluster_suff_stats(ctx.data.X, ctx.basis, e);
}

// Takes predictor i out of its cluster. Returns the auxiliary smoothing
// precision for a fresh cluster: the predictor's own value when it was a
// singleton, otherwise a draw from the base measure.
double remove_predictor(ModelState& state, int i, const PriorConfig& prior, Rng& rng) {
  const int old = state.labels[i];
  double aux;
  if (old > 0 &&
      std::count(state.labels.begin(), state.labels.end(), old) == 1) {
    aux = state.lambda_b[old - 1];
  } else {
    aux = rng.gamma(prior.lambda.shape, prior.lambda.rate);
  }
  state.labels[i] = 0;
  compact_labels(state.labels, &state.lambda_b);
  return aux;
}

double candidate_loglik(LabelUpdateWorkspace& ws, const ModelState& state, int i, int label,
                        double aux, const SamplerContext& ctx, const ClusterSuffStats& stats) {
  const int k = state.num_clusters();
  ws.labels = state.labels;
  ws.labels[i] = label;
  if (label == k + 1) {
    ws.lambda.resize(k + 1);
    ws.lambda.head(k) = state.lambda_b;
    ws.lambda[k] = aux;
  } else {
    ws.lambda = state.lambda_b;
  }
  assemble_candidate(ws, stats, ctx.basis, state.tau);
  return marginal_loglik(ws, state.tau, ctx.basis);
}

void assign(ModelState& state, int i, int label, double aux) {
  const int k = state.num_clusters();
  state.labels[i] = label;
  if (label == k + 1) {
    state.lambda_b.conservativeResize(k + 1);
    state.lambda_b[k] = aux;
  }
}

void finish_label_update(ModelState& state, const SamplerContext& ctx) {
  // B is collapsed during the label update and redrawn immediately afterwards
  state.B = Eigen::MatrixXd::Zero(ctx.basis.num_basis(), state.num_clusters());
}

}  // namespace

GaussianConditional clustered_conditional(const ModelState& state, const SamplerContext& ctx) {
  const ClusterSuffStats stats = sweep_stats(state, ctx);
  LabelUpdateWorkspace ws;
  ws.labels = state.labels;
  ws.lambda = state.lambda_b;
  assemble_candidate(ws, stats, ctx.basis, state.tau);
  return solve_conditional(state.tau * ws.G, state.tau * ws.g);
}

GaussianConditional free_conditional(const ModelState& state, const SamplerContext& ctx) {
  const auto& d = ctx.data;
  const auto& theta = ctx.basis.theta;
  Eigen::MatrixXd e = d.Y.transpose();
  if (state.num_clusters() > 0) {
    const Eigen::MatrixXd xc = d.X * one_hot(state.labels, state.num_clusters());
    e.noalias() -= theta * state.B * xc.transpose();
  }
  const Eigen::MatrixXd cross = theta.transpose() * (e * d.W);
  const Eigen::MatrixXd precision =
      kron_precision(d.W.transpose() * d.W, ctx.basis.theta_gram, state.lambda_a,
                     ctx.basis.penalty, state.tau);
  const Eigen::VectorXd rhs =
      state.tau * Eigen::Map<const Eigen::VectorXd>(cross.data(), cross.size());
  return solve_conditional(precision, rhs);
}

Eigen::VectorXd draw_gaussian(const GaussianConditional& cond, Rng& rng) {
  Eigen::LLT<Eigen::MatrixXd> llt(cond.precision);
  if (llt.info() != Eigen::Success) throw NumericalError("precision matrix is not positive definite");
  Eigen::VectorXd z(cond.mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return cond.mean + llt.matrixU().solve(z);
}

void update_coefficients(ModelState& state, const SamplerContext& ctx, CoefficientBlock which,
                         Rng& rng) {
  const auto m = ctx.basis.num_basis();
  if (which == CoefficientBlock::kClustered) {
    const int k = state.num_clusters();
    if (k == 0) {
      state.B.resize(m, 0);
      return;
    }
    const Eigen::VectorXd b = draw_gaussian(clustered_conditional(state, ctx), rng);
    state.B = Eigen::Map<const Eigen::MatrixXd>(b.data(), m, k);
  } else {
    const Eigen::VectorXd a = draw_gaussian(free_conditional(state, ctx), rng);
    state.A = Eigen::Map<const Eigen::MatrixXd>(a.data(), m, ctx.data.num_free());
  }
}

double residual_sum_squares(const ModelState& state, const SamplerContext& ctx) {
  const auto& d = ctx.data;
  Eigen::MatrixXd e = free_residual_matrix(d.Y, ctx.basis.theta, state.A, d.W);
  if (state.num_clusters() > 0) {
    e.noalias() -= ctx.basis.theta * state.B *
                   (d.X * one_hot(state.labels, state.num_clusters())).transpose();
  }
  return e.squaredNorm();
}

void update_precisions(ModelState& state, const SamplerContext& ctx, Rng& rng) {
  const auto& prior = ctx.prior;
  const auto& r = ctx.basis.penalty;
  const double half_m = 0.5 * static_cast<double>(ctx.basis.num_basis());
  for (Eigen::Index p = 0; p < state.A.cols(); ++p) {
    const double q = state.A.col(p).dot(r * state.A.col(p));
    state.lambda_a[p] = rng.gamma(prior.lambda.shape + half_m, prior.lambda.rate + 0.5 * q);
  }
  for (Eigen::Index k = 0; k < state.B.cols(); ++k) {
    const double q = state.B.col(k).dot(r * state.B.col(k));
    state.lambda_b[k] = rng.gamma(prior.lambda.shape + half_m, prior.lambda.rate + 0.5 * q);
  }
  const double nt = static_cast<double>(ctx.data.Y.size());
  state.tau = rng.gamma(prior.tau.shape + 0.5 * nt,
                        prior.tau.rate + 0.5 * residual_sum_squares(state, ctx));
}

std::vector<double> dp_label_log_prior(std::span<const int> sizes, double alpha, int num_others) {
  const double log_denom = std::log(static_cast<double>(num_others) + alpha);
  std::vector<double> out;
  out.reserve(sizes.size() + 1);
  for (int n : sizes) out.push_back(std::log(static_cast<double>(n)) - log_denom);
  out.push_back(std::log(alpha) - log_denom);
  return out;
}

double null_prior_probability(int null_others, int num_predictors, double alpha0) {
  return (null_others + 0.5 * alpha0) / (num_predictors - 1 + alpha0);
}

std::vector<double> dppm_label_log_prior(int null_others, std::span<const int> sizes,
                                         double alpha, double alpha0, int num_predictors) {
  const double pi0 = null_prior_probability(null_others, num_predictors, alpha0);
  const int nonnull_others = std::accumulate(sizes.begin(), sizes.end(), 0);
  std::vector<double> out;
  out.reserve(sizes.size() + 2);
  out.push_back(std::log(pi0));
  const double log_slab = std::log1p(-pi0);
  for (double w : dp_label_log_prior(sizes, alpha, nonnull_others)) out.push_back(log_slab + w);
  return out;
}

int sample_from_log_weights(std::span<const double> log_weights, Rng& rng,
                            std::vector<double>* probabilities) {
  if (log_weights.empty()) throw std::invalid_argument("sample_from_log_weights: no candidates");
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  if (!std::isfinite(top)) throw NumericalError("label update: no candidate has finite log weight");
  std::vector<double> p(log_weights.size());
  double total = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    p[j] = std::exp(log_weights[j] - top);
    total += p[j];
  }
  for (double& v : p) v /= total;
  const double u = rng.uniform();
  double cum = 0.0;
  int chosen = static_cast<int>(p.size()) - 1;
  for (std::size_t j = 0; j < p.size(); ++j) {
    cum += p[j];
    if (u < cum) {
      chosen = static_cast<int>(j);
      break;
    }
  }
  if (probabilities != nullptr) *probabilities = std::move(p);
  return chosen;
}

void update_labels_dp(ModelState& state, const SamplerContext& ctx, Rng& rng) {
  const ClusterSuffStats stats = sweep_stats(state, ctx);
  const int pc = static_cast<int>(state.labels.size());
  LabelUpdateWorkspace ws;
  for (int i = 0; i < pc; ++i) {
    const double aux = remove_predictor(state, i, ctx.prior, rng);
    const int k = state.num_clusters();
    const std::vector<int> sizes = cluster_sizes(state.labels, k);
    // sizes[0] counts predictor i itself (temporarily unlabeled)
    ws.log_probs = dp_label_log_prior(std::span(sizes).subspan(1), state.alpha, pc - 1);
    for (int c = 1; c <= k + 1; ++c) {
      ws.log_probs[c - 1] += candidate_loglik(ws, state, i, c, aux, ctx, stats);
    }
    assign(state, i, 1 + sample_from_log_weights(ws.log_probs, rng), aux);
  }
  finish_label_update(state, ctx);
}

void update_labels_dppm(ModelState& state, const SamplerContext& ctx, Rng& rng) {
  const ClusterSuffStats stats = sweep_stats(state, ctx);
  const int pc = static_cast<int>(state.labels.size());
  LabelUpdateWorkspace ws;
  for (int i = 0; i < pc; ++i) {
    const double aux = remove_predictor(state, i, ctx.prior, rng);
    const int k = state.num_clusters();
    const std::vector<int> sizes = cluster_sizes(state.labels, k);
    ws.log_probs = dppm_label_log_prior(sizes[0] - 1, std::span(sizes).subspan(1), state.alpha,
                                        ctx.prior.alpha0, pc);
    for (int c = 0; c <= k + 1; ++c) {
      ws.log_probs[c] += candidate_loglik(ws, state, i, c, aux, ctx, stats);
    }
    assign(state, i, sample_from_log_weights(ws.log_probs, rng), aux);
  }
  finish_label_update(state, ctx);
}

void update_labels_pm(ModelState& state, const SamplerContext& ctx, Rng& rng) {
  const ClusterSuffStats stats = sweep_stats(state, ctx);
  const int pc = static_cast<int>(state.labels.size());
  LabelUpdateWorkspace ws;
  for (int i = 0; i < pc; ++i) {
    // every included predictor is a singleton, so an included one keeps its own lambda
    const double aux = remove_predictor(state, i, ctx.prior, rng);
    const int k = state.num_clusters();
    const int null_others = pc - 1 - k;
    const double pi0 = null_prior_probability(null_others, pc, ctx.prior.alpha0);
    ws.log_probs = {std::log(pi0), std::log1p(-pi0)};
    ws.log_probs[0] += candidate_loglik(ws, state, i, 0, aux, ctx, stats);
    ws.log_probs[1] += candidate_loglik(ws, state, i, k + 1, aux, ctx, stats);
    const int included = sample_from_log_weights(ws.log_probs, rng);
    assign(state, i, included ? k + 1 : 0, aux);
  }
  finish_label_update(state, ctx);
}

double update_alpha(int num_clusters, int num_items, const GammaPrior& prior, double current,
                    Rng& rng) {
  if (num_items < 1 || num_clusters < 1) {
    throw std::invalid_argument("update_alpha: need at least one item and one cluster");
  }
  if (num_clusters > num_items) throw std::invalid_argument("update_alpha: K exceeds n");
  const double n = num_items;
  const double k = num_clusters;
  const double u = rng.beta(current + 1.0, n);
  const double rate = prior.rate - std::log(u);
  const double odds = (prior.shape + k - 1.0) / (n * rate);
  const double shape = rng.uniform() < odds / (1.0 + odds) ? prior.shape + k : prior.shape + k - 1.0;
  return rng.gamma(shape, rate);
}

ModelState initial_state(const SamplerContext& ctx) {
  const auto m = ctx.basis.num_basis();
  const int pc = static_cast<int>(ctx.data.num_clusterable());
  ModelState s;
  s.A = Eigen::MatrixXd::Zero(m, ctx.data.num_free());
  s.B = Eigen::MatrixXd::Zero(m, pc);
  s.labels.resize(pc);
  std::iota(s.labels.begin(), s.labels.end(), 1);
  s.lambda_a = Eigen::VectorXd::Ones(ctx.data.num_free());
  s.lambda_b = Eigen::VectorXd::Ones(pc);
  s.tau = 1.0;
  s.alpha = 1.0;
  return s;
}

void gibbs_sweep(ModelState& state, const SamplerContext& ctx, Rng& rng) {
  switch (ctx.prior.variant) {
    case Variant::kFosr: break;
    case Variant::kFosrPm: update_labels_pm(state, ctx, rng); break;
    case Variant::kFosrDp: update_labels_dp(state, ctx, rng); break;
    case Variant::kFosrDppm: update_labels_dppm(state, ctx, rng); break;
  }
  update_coefficients(state, ctx, CoefficientBlock::kClustered, rng);
  update_coefficients(state, ctx, CoefficientBlock::kFree, rng);
  update_precisions(state, ctx, rng);
  if (has_concentration(ctx.prior.variant)) {
    const int n = ctx.prior.variant == Variant::kFosrDp ? static_cast<int>(state.labels.size())
                                                        : state.num_nonnull();
    // with every predictor null the labels carry no information about alpha
    state.alpha = n >= 1 ? update_alpha(state.num_clusters(), n, ctx.prior.alpha, state.alpha, rng)
                         : rng.gamma(ctx.prior.alpha.shape, ctx.prior.alpha.rate);
  }
  ++state.iteration;
}

ModelState draw_prior_state(const SamplerContext& ctx, Rng& rng) {
  const auto& prior = ctx.prior;
  const int pc = static_cast<int>(ctx.data.num_clusterable());
  const auto pf = ctx.data.num_free();
  ModelState s;
  s.tau = rng.gamma(prior.tau.shape, prior.tau.rate);
  s.alpha = has_concentration(prior.variant) ? rng.gamma(prior.alpha.shape, prior.alpha.rate) : 1.0;
  s.lambda_a.resize(pf);
  for (Eigen::Index p = 0; p < pf; ++p) s.lambda_a[p] = rng.gamma(prior.lambda.shape, prior.lambda.rate);
  s.A = draw_penalized_columns(ctx.basis, s.lambda_a, rng);

  s.labels.assign(pc, 0);
  double pi0 = 0.0;
  if (has_null_cluster(prior.variant)) pi0 = rng.beta(0.5 * prior.alpha0, 0.5 * prior.alpha0);
  int k = 0;
  std::vector<int> sizes;
  for (int p = 0; p < pc; ++p) {
    if (has_null_cluster(prior.variant) && rng.uniform() < pi0) continue;
    if (prior.variant == Variant::kFosr || prior.variant == Variant::kFosrPm) {
      s.labels[p] = ++k;
      continue;
    }
    // Chinese restaurant seating among the non-null predictors
    std::vector<double> w(k + 1);
    for (int j = 0; j < k; ++j) w[j] = std::log(static_cast<double>(sizes[j]));
    w[k] = std::log(s.alpha);
    const int c = sample_from_log_weights(w, rng);
    if (c == k) {
      sizes.push_back(1);
      ++k;
    } else {
      ++sizes[c];
    }
    s.labels[p] = c + 1;
  }
  s.lambda_b.resize(k);
  for (int j = 0; j < k; ++j) s.lambda_b[j] = rng.gamma(prior.lambda.shape, prior.lambda.rate);
  s.B = draw_penalized_columns(ctx.basis, s.lambda_b, rng);
  return s;
}

Eigen::MatrixXd draw_response(const ModelState& state, const SamplerContext& ctx, Rng& rng) {
  const auto& d = ctx.data;
  const auto& theta = ctx.basis.theta;
  Eigen::MatrixXd mean_t = theta * state.A * d.W.transpose();
  if (state.num_clusters() > 0) {
    mean_t.noalias() +=
        theta * state.B * (d.X * one_hot(state.labels, state.num_clusters())).transpose();
  }
  const double sd = 1.0 / std::sqrt(state.tau);
  Eigen::MatrixXd y(d.num_subjects(), theta.rows());
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    for (Eigen::Index t = 0; t < y.cols(); ++t) y(i, t) = mean_t(t, i) + sd * rng.normal();
  }
  return y;
}

}  // namespace fosr
