#include "fosr/model.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace fosr {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kFosr: return "fosr";
    case Variant::kFosrPm: return "fosr-pm";
    case Variant::kFosrDp: return "fosr-dp";
    case Variant::kFosrDppm: return "fosr-dppm";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  std::replace(lower.begin(), lower.end(), '_', '-');
  if (lower == "fosr") return Variant::kFosr;
  if (lower == "fosr-pm") return Variant::kFosrPm;
  if (lower == "fosr-dp") return Variant::kFosrDp;
  if (lower == "fosr-dppm") return Variant::kFosrDppm;
  throw std::invalid_argument("unknown variant '" + std::string(name) +
                              "' (expected fosr, fosr-pm, fosr-dp or fosr-dppm)");
}

void FunctionalDataset::validate() {
  const auto n = Y.rows();
  if (n < 1 || Y.cols() < 2) throw std::invalid_argument("Y must have at least one row and two columns");
  if (grid.size() != Y.cols()) {
    throw std::invalid_argument("grid has " + std::to_string(grid.size()) + " points but Y has " +
                                std::to_string(Y.cols()) + " columns");
  }
  if (W.rows() != n || X.rows() != n) {
    throw std::invalid_argument("Y, W and X must share the number of rows (Y=" + std::to_string(n) +
                                ", W=" + std::to_string(W.rows()) +
                                ", X=" + std::to_string(X.rows()) + ")");
  }
  if (W.cols() < 1) throw std::invalid_argument("W needs at least the intercept column");
  if (X.cols() < 1) throw std::invalid_argument("X needs at least one clusterable predictor");
  if (free_names.empty()) {
    for (Eigen::Index p = 0; p < W.cols(); ++p) free_names.push_back("w" + std::to_string(p));
  }
  if (cluster_names.empty()) {
    for (Eigen::Index p = 0; p < X.cols(); ++p) cluster_names.push_back("x" + std::to_string(p + 1));
  }
  if (static_cast<Eigen::Index>(free_names.size()) != W.cols() ||
      static_cast<Eigen::Index>(cluster_names.size()) != X.cols()) {
    throw std::invalid_argument("predictor name count does not match predictor columns");
  }
}

void PriorConfig::validate() const {
  auto positive = [](const GammaPrior& g, const char* what) {
    if (!(g.shape > 0.0 && g.rate > 0.0)) {
      throw std::invalid_argument(std::string(what) + " prior needs positive shape and rate");
    }
  };
  positive(lambda, "lambda");
  positive(tau, "tau");
  positive(alpha, "alpha");
  if (!(alpha0 > 0.0)) throw std::invalid_argument("alpha0 must be positive");
  if (num_basis < std::max(3, degree + 1)) throw std::invalid_argument("num_basis too small for degree");
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must be in (0, 1]");
}

int ModelState::num_nonnull() const {
  return static_cast<int>(std::count_if(labels.begin(), labels.end(), [](int c) { return c > 0; }));
}

void ModelState::check(bool allow_null) const {
  const int k = num_clusters();
  if (B.cols() != k) throw std::logic_error("B columns do not match the number of clusters");
  std::vector<int> sizes(k + 1, 0);
  for (int c : labels) {
    if (c < 0 || c > k || (c == 0 && !allow_null)) throw std::logic_error("label out of range");
    ++sizes[c];
  }
  for (int j = 1; j <= k; ++j) {
    if (sizes[j] == 0) throw std::logic_error("empty cluster " + std::to_string(j));
  }
  if ((lambda_b.array() <= 0.0).any() || (lambda_a.array() <= 0.0).any() || !(tau > 0.0)) {
    throw std::logic_error("precisions must be positive");
  }
}

Eigen::MatrixXd one_hot(std::span<const int> labels, int num_clusters) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()), num_clusters);
  for (std::size_t p = 0; p < labels.size(); ++p) {
    if (labels[p] < 0 || labels[p] > num_clusters) {
      throw std::invalid_argument("one_hot: label " + std::to_string(labels[p]) + " outside 0.." +
                                  std::to_string(num_clusters));
    }
    if (labels[p] > 0) c(static_cast<Eigen::Index>(p), labels[p] - 1) = 1.0;
  }
  return c;
}

std::vector<int> labels_from_one_hot(const Eigen::MatrixXd& c) {
  std::vector<int> labels(c.rows(), 0);
  for (Eigen::Index p = 0; p < c.rows(); ++p) {
    for (Eigen::Index k = 0; k < c.cols(); ++k) {
      if (c(p, k) != 0.0) labels[p] = static_cast<int>(k) + 1;
    }
  }
  return labels;
}

Eigen::MatrixXd assemble_design(const Eigen::MatrixXd& x, const Eigen::MatrixXd& c,
                                const Eigen::MatrixXd& theta) {
  if (x.cols() != c.rows()) {
    throw std::invalid_argument("assemble_design: X has " + std::to_string(x.cols()) +
                                " columns but C has " + std::to_string(c.rows()) + " rows");
  }
  const Eigen::MatrixXd xc = x * c;
  const auto t = theta.rows();
  const auto m = theta.cols();
  Eigen::MatrixXd out(xc.rows() * t, xc.cols() * m);
  for (Eigen::Index i = 0; i < xc.rows(); ++i) {
    for (Eigen::Index k = 0; k < xc.cols(); ++k) out.block(i * t, k * m, t, m) = xc(i, k) * theta;
  }
  return out;
}

Eigen::MatrixXd free_residual_matrix(const Eigen::MatrixXd& y, const Eigen::MatrixXd& theta,
                                     const Eigen::MatrixXd& a, const Eigen::MatrixXd& w) {
  if (theta.cols() != a.rows() || a.cols() != w.cols() || y.rows() != w.rows() ||
      y.cols() != theta.rows()) {
    throw std::invalid_argument("residual_free: dimension mismatch");
  }
  return y.transpose() - theta * a * w.transpose();
}

Eigen::VectorXd residual_free(const Eigen::MatrixXd& y, const Eigen::MatrixXd& theta,
                              const Eigen::MatrixXd& a, const Eigen::MatrixXd& w) {
  const Eigen::MatrixXd e = free_residual_matrix(y, theta, a, w);
  return Eigen::Map<const Eigen::VectorXd>(e.data(), e.size());
}

Eigen::MatrixXd cluster_curves(const Eigen::MatrixXd& theta, const ModelState& state) {
  const Eigen::MatrixXd coef = state.B * one_hot(state.labels, state.num_clusters()).transpose();
  return theta * coef;
}

int compact_labels(std::vector<int>& labels, Eigen::VectorXd* lambda) {
  int max_label = 0;
  for (int c : labels) max_label = std::max(max_label, c);
  std::vector<int> remap(max_label + 1, 0);
  for (int c : labels) {
    if (c > 0) remap[c] = 1;
  }
  int next = 0;
  std::vector<Eigen::Index> keep;
  for (int c = 1; c <= max_label; ++c) {
    if (remap[c]) {
      remap[c] = ++next;
      keep.push_back(c - 1);
    }
  }
  for (int& c : labels) c = remap[c];
  if (lambda != nullptr) {
    Eigen::VectorXd kept(next);
    for (int j = 0; j < next; ++j) kept[j] = (*lambda)[keep[j]];
    *lambda = std::move(kept);
  }
  return next;
}

std::vector<int> cluster_sizes(std::span<const int> labels, int num_clusters) {
  std::vector<int> sizes(num_clusters + 1, 0);
  for (int c : labels) ++sizes.at(c);
  return sizes;
}

}  // namespace fosr
