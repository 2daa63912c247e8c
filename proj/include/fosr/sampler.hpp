#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fosr/basis.hpp"
#include "fosr/marginal.hpp"
#include "fosr/model.hpp"
#include "fosr/random.hpp"

namespace fosr {

/// Read-only inputs shared by every update in a chain.
struct SamplerContext {
  const FunctionalDataset& data;
  const BasisSystem& basis;
  const PriorConfig& prior;
};

/// Multivariate normal full conditional in canonical form.
struct GaussianConditional {
  Eigen::VectorXd mean;
  Eigen::MatrixXd precision;
};

enum class CoefficientBlock { kFree, kClustered };

/// Conditional of vec(B) given labels, A, lambda_b and tau:
/// precision tau X~'X~ + Lambda_b kron R, mean precision^{-1} tau X~' e_W.
GaussianConditional clustered_conditional(const ModelState& state, const SamplerContext& ctx);

/// Conditional of vec(A) given B, labels, lambda_a and tau.
GaussianConditional free_conditional(const ModelState& state, const SamplerContext& ctx);

/// Draws from N(mean, precision^{-1}) via the Cholesky factor of the precision.
Eigen::VectorXd draw_gaussian(const GaussianConditional& cond, Rng& rng);

void update_coefficients(ModelState& state, const SamplerContext& ctx, CoefficientBlock which,
                         Rng& rng);

/// ||Y' - Theta A W' - Theta B (X C)'||^2
double residual_sum_squares(const ModelState& state, const SamplerContext& ctx);

/// Conjugate Gamma draws for lambda_a, lambda_b and tau.
void update_precisions(ModelState& state, const SamplerContext& ctx, Rng& rng);

/// Log prior weights of the Chinese-restaurant conditional: entry k-1 for
/// existing cluster k (sizes exclude the predictor being updated), last entry
/// for a new cluster.
std::vector<double> dp_label_log_prior(std::span<const int> sizes, double alpha, int num_others);

/// Prior probability of the null cluster with pi_0 ~ Beta(alpha0/2, alpha0/2) integrated out.
double null_prior_probability(int null_others, int num_predictors, double alpha0);

/// Log prior weights for (null, existing clusters..., new) under the point-mass DP.
std::vector<double> dppm_label_log_prior(int null_others, std::span<const int> sizes,
                                         double alpha, double alpha0, int num_predictors);

/// Inverse-CDF draw from unnormalized log weights (log-sum-exp normalized).
int sample_from_log_weights(std::span<const double> log_weights, Rng& rng,
                            std::vector<double>* probabilities = nullptr);

void update_labels_dp(ModelState& state, const SamplerContext& ctx, Rng& rng);
void update_labels_dppm(ModelState& state, const SamplerContext& ctx, Rng& rng);
void update_labels_pm(ModelState& state, const SamplerContext& ctx, Rng& rng);

/// Escobar-West auxiliary-variable update of the DP concentration given K
/// occupied clusters among n items.
double update_alpha(int num_clusters, int num_items, const GammaPrior& prior, double current,
                    Rng& rng);

/// Starting point: every predictor in its own cluster, unit precisions, zero coefficients.
ModelState initial_state(const SamplerContext& ctx);

/// One full cycle: labels (if any) -> B -> A -> precisions -> alpha (if any).
void gibbs_sweep(ModelState& state, const SamplerContext& ctx, Rng& rng);

/// Joint prior draw of every sampled quantity.
ModelState draw_prior_state(const SamplerContext& ctx, Rng& rng);

/// Y ~ p(Y | state) under the iid-error model, N x T.
Eigen::MatrixXd draw_response(const ModelState& state, const SamplerContext& ctx, Rng& rng);

}  // namespace fosr
