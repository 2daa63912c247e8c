#include "fosr/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

#include "fosr/random.hpp"

namespace fosr {
namespace {

double choose2(double n) { return 0.5 * n * (n - 1.0); }

void check_pair(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw std::invalid_argument("label vectors differ in length");
  if (a.size() < 2) throw std::invalid_argument("need at least two items to compare partitions");
}

struct Contingency {
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> rows, cols;
};

Contingency contingency(std::span<const int> a, std::span<const int> b) {
  Contingency c;
  for (std::size_t i = 0; i < a.size(); ++i) {
    c.joint[{a[i], b[i]}] += 1.0;
    c.rows[a[i]] += 1.0;
    c.cols[b[i]] += 1.0;
  }
  return c;
}

}  // namespace

double pointwise_mse(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
    throw std::invalid_argument("pointwise_mse: shape mismatch");
  }
  if (estimate.size() == 0) throw std::invalid_argument("pointwise_mse: empty input");
  return (estimate - truth).array().square().mean();
}

double rand_index(std::span<const int> a, std::span<const int> b) {
  check_pair(a, b);
  const auto c = contingency(a, b);
  double same_both = 0.0, same_a = 0.0, same_b = 0.0;
  for (const auto& [key, n] : c.joint) same_both += choose2(n);
  for (const auto& [key, n] : c.rows) same_a += choose2(n);
  for (const auto& [key, n] : c.cols) same_b += choose2(n);
  const double pairs = choose2(static_cast<double>(a.size()));
  // agreements = pairs together in both + pairs apart in both
  return (pairs + 2.0 * same_both - same_a - same_b) / pairs;
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  check_pair(a, b);
  const auto c = contingency(a, b);
  double index = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [key, n] : c.joint) index += choose2(n);
  for (const auto& [key, n] : c.rows) sum_a += choose2(n);
  for (const auto& [key, n] : c.cols) sum_b += choose2(n);
  const double expected = sum_a * sum_b / choose2(static_cast<double>(a.size()));
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

Eigen::MatrixXd coclustering_matrix(const Eigen::MatrixXi& label_draws) {
  const auto s = label_draws.rows();
  const auto p = label_draws.cols();
  if (s < 1) throw std::invalid_argument("coclustering_matrix: no draws");
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      const double f = (label_draws.col(i).array() == label_draws.col(j).array()).cast<double>().sum() /
                       static_cast<double>(s);
      out(i, j) = f;
      out(j, i) = f;
    }
  }
  return out;
}

Eigen::Index least_squares_draw(const Eigen::MatrixXi& label_draws,
                                const Eigen::MatrixXd& coclustering) {
  const auto p = label_draws.cols();
  Eigen::Index best = 0;
  double best_loss = std::numeric_limits<double>::infinity();
  for (Eigen::Index s = 0; s < label_draws.rows(); ++s) {
    double loss = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) {
      for (Eigen::Index j = i + 1; j < p; ++j) {
        const double same = label_draws(s, i) == label_draws(s, j) ? 1.0 : 0.0;
        loss += (same - coclustering(i, j)) * (same - coclustering(i, j));
      }
    }
    if (loss < best_loss) {
      best_loss = loss;
      best = s;
    }
  }
  return best;
}

std::vector<Merge> dendrogram(const Eigen::MatrixXd& coclustering) {
  const auto n = coclustering.rows();
  if (coclustering.cols() != n) throw std::invalid_argument("dendrogram: matrix must be square");
  if (n > 0 && (coclustering - coclustering.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("dendrogram: co-clustering matrix must be symmetric");
  }

  // active cluster ids with their sizes and pairwise average dissimilarities
  std::vector<int> ids(n);
  std::vector<int> sizes(n, 1);
  Eigen::MatrixXd dist = (1.0 - coclustering.array()).matrix();
  for (Eigen::Index i = 0; i < n; ++i) ids[i] = static_cast<int>(i);

  std::vector<Merge> merges;
  int next_id = static_cast<int>(n);
  std::vector<Eigen::Index> active(n);
  for (Eigen::Index i = 0; i < n; ++i) active[i] = i;

  while (active.size() > 1) {
    std::size_t best_a = 0, best_b = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < active.size(); ++a) {
      for (std::size_t b = a + 1; b < active.size(); ++b) {
        const double d = dist(active[a], active[b]);
        if (d < best) {
          best = d;
          best_a = a;
          best_b = b;
        }
      }
    }
    const Eigen::Index ra = active[best_a];
    const Eigen::Index rb = active[best_b];
    const int na = sizes[ra];
    const int nb = sizes[rb];
    merges.push_back({static_cast<int>(merges.size()), std::min(ids[ra], ids[rb]),
                      std::max(ids[ra], ids[rb]), best, na + nb});
    // slot ra now holds the merged cluster
    for (Eigen::Index k : active) {
      if (k == ra || k == rb) continue;
      const double d = (na * dist(ra, k) + nb * dist(rb, k)) / (na + nb);
      dist(ra, k) = d;
      dist(k, ra) = d;
    }
    sizes[ra] = na + nb;
    ids[ra] = next_id++;
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_b));
  }
  return merges;
}

Eigen::VectorXd percent_zero(const Eigen::MatrixXi& label_draws) {
  if (label_draws.rows() < 1) throw std::invalid_argument("percent_zero: no draws");
  return (label_draws.array() == 0).cast<double>().colwise().mean().transpose();
}

std::vector<int> select_nonzero(const Eigen::VectorXd& pz, double cutoff) {
  std::vector<int> out;
  for (Eigen::Index p = 0; p < pz.size(); ++p) {
    if (pz[p] < cutoff) out.push_back(static_cast<int>(p));
  }
  return out;
}

double quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw std::invalid_argument("quantile: no values");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  const double h = n * prob + 0.5;  // 1-based fractional order statistic
  if (h <= 1.0) return values.front();
  if (h >= n) return values.back();
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  return values[lo - 1] + frac * (values[lo] - values[lo - 1]);
}

CurveSummary curve_summary(const Eigen::MatrixXd& curve_draws) {
  if (curve_draws.rows() < 40) {
    throw std::invalid_argument("curve_summary: need at least 40 draws for 2.5% quantiles (got " +
                                std::to_string(curve_draws.rows()) + ")");
  }
  const auto t = curve_draws.cols();
  CurveSummary out;
  out.mean = curve_draws.colwise().mean().transpose();
  out.lower.resize(t);
  out.upper.resize(t);
  for (Eigen::Index j = 0; j < t; ++j) {
    std::vector<double> col(curve_draws.col(j).data(), curve_draws.col(j).data() + curve_draws.rows());
    out.lower[j] = quantile(col, 0.025);
    out.upper[j] = quantile(std::move(col), 0.975);
  }
  return out;
}

double bootstrap_se(std::span<const double> values, int reps, std::uint64_t seed) {
  if (values.empty()) throw std::invalid_argument("bootstrap_se: no values");
  if (reps < 2) throw std::invalid_argument("bootstrap_se: need at least 2 repetitions");
  Rng rng(seed);
  const auto n = values.size();
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> means(reps);
  for (int r = 0; r < reps; ++r) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += values[pick(rng.engine())];
    means[r] = sum / static_cast<double>(n);
  }
  double mu = 0.0;
  for (double m : means) mu += m;
  mu /= reps;
  double ss = 0.0;
  for (double m : means) ss += (m - mu) * (m - mu);
  return std::sqrt(ss / (reps - 1));
}

std::vector<CellSummary> aggregate_study(const std::vector<EvaluationReport>& reports,
                                         const std::vector<std::string>& variants,
                                         int bootstrap_reps, std::uint64_t seed) {
  auto variant_rank = [&](const std::string& v) {
    const auto it = std::find(variants.begin(), variants.end(), v);
    return static_cast<int>(it - variants.begin());
  };
  using Key = std::tuple<int, int, int>;
  std::map<Key, std::vector<const EvaluationReport*>> cells;
  for (const auto& r : reports) cells[{r.design_id, r.num_subjects, variant_rank(r.variant)}].push_back(&r);

  std::vector<CellSummary> out;
  for (const auto& [key, members] : cells) {
    CellSummary cell{};
    cell.design_id = std::get<0>(key);
    cell.num_subjects = std::get<1>(key);
    cell.variant = members.front()->variant;
    std::vector<double> mse, rand, ari;
    for (const auto* r : members) {
      if (!r->ok) {
        ++cell.failed;
        continue;
      }
      mse.push_back(r->pointwise_mse);
      rand.push_back(r->rand);
      ari.push_back(r->adjusted_rand);
    }
    cell.replicates = static_cast<int>(mse.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto summarize = [&](const std::vector<double>& v, int metric, double& mean, double& se) {
      mean = nan;
      se = nan;
      if (v.empty()) return;
      double s = 0.0;
      for (double x : v) s += x;
      mean = s / static_cast<double>(v.size());
      if (v.size() >= 2) {
        se = bootstrap_se(v, bootstrap_reps,
                          derive_seed(seed, {static_cast<std::uint64_t>(cell.design_id),
                                             static_cast<std::uint64_t>(cell.num_subjects),
                                             static_cast<std::uint64_t>(std::get<2>(key)),
                                             static_cast<std::uint64_t>(metric)}));
      }
    };
    summarize(mse, 0, cell.mse_mean, cell.mse_se);
    summarize(rand, 1, cell.rand_mean, cell.rand_se);
    summarize(ari, 2, cell.ari_mean, cell.ari_se);
    out.push_back(cell);
  }
  return out;
}

}  // namespace fosr
