#include "dqc/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dqc/errors.hpp"

namespace dqc {

namespace {

// Squared singular values are the eigenvalues of the smaller Gram matrix.
Eigen::VectorXd squared_singular_values(const Eigen::MatrixXd& gram) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericalError("eigenvalue solver did not converge");
  return eig.eigenvalues().cwiseMax(0.0);
}

// Returns nullopt when every share is zero.
std::optional<double> entropy_of(const Eigen::VectorXd& sq, Eigen::Index k) {
  const double total = sq.sum();
  if (!(total > 0.0)) return std::nullopt;
  if (k <= 1) return 0.0;
  double h = 0.0;
  for (Eigen::Index j = 0; j < sq.size(); ++j) {
    const double rho = sq(j) / total;
    if (rho > 0.0) h -= rho * std::log(rho);
  }
  return std::clamp(h / std::log(static_cast<double>(k)), 0.0, 1.0);
}

Eigen::MatrixXd small_gram(const Eigen::MatrixXd& m) {
  if (m.rows() <= m.cols()) return m * m.transpose();
  return m.transpose() * m;
}

}  // namespace

double svd_entropy(const Eigen::MatrixXd& m) {
  if (m.rows() < 1 || m.cols() < 1) throw ArgumentError("entropy of an empty matrix");
  const auto e = entropy_of(squared_singular_values(small_gram(m)), std::min(m.rows(), m.cols()));
  if (!e) throw UndefinedEntropyError("SVD entropy is undefined for an all-zero matrix");
  return *e;
}

double svd_entropy(const DataMatrix& m) { return svd_entropy(m.values); }

FeatureScores feature_contributions(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  const Eigen::Index d = m.cols();
  if (d < 2) throw ArgumentError("feature contributions need at least two features");

  FeatureScores scores;
  scores.entropy_full = svd_entropy(m);
  scores.contributions.resize(d);

  const Eigen::Index k_loo = std::min(n, d - 1);
  if (n <= d - 1) {
    // Short side stays n: downdate M M^T by one outer product per feature.
    const Eigen::MatrixXd g = m * m.transpose();
    for (Eigen::Index i = 0; i < d; ++i) {
      Eigen::MatrixXd gi = g - m.col(i) * m.col(i).transpose();
      const auto e = entropy_of(squared_singular_values(gi), k_loo);
      scores.contributions(i) = scores.entropy_full - e.value_or(0.0);
    }
  } else {
    // Short side is the feature axis: drop row/column i of M^T M.
    const Eigen::MatrixXd g = m.transpose() * m;
    Eigen::MatrixXd gi(d - 1, d - 1);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index a = 0, ra = 0; a < d; ++a) {
        if (a == i) continue;
        for (Eigen::Index b = 0, rb = 0; b < d; ++b) {
          if (b == i) continue;
          gi(ra, rb++) = g(a, b);
        }
        ++ra;
      }
      const auto e = entropy_of(squared_singular_values(gi), k_loo);
      scores.contributions(i) = scores.entropy_full - e.value_or(0.0);
    }
  }
  return scores;
}

FeatureScores feature_contributions(const DataMatrix& m) { return feature_contributions(m.values); }

FilterResult filter_features(const DataMatrix& m, std::size_t stages, const RetentionRule& rule) {
  if (stages < 1) throw ArgumentError("filter stages must be at least 1");
  m.validate();

  FilterResult result;
  result.kept.resize(m.cols());
  std::iota(result.kept.begin(), result.kept.end(), std::size_t{0});
  result.filtered = m;

  for (std::size_t stage = 1; stage <= stages; ++stage) {
    if (result.filtered.cols() < 2) {
      result.stopped_early = true;
      result.stop_reason = "fewer than two features left to score";
      break;
    }
    FeatureScores scores = feature_contributions(result.filtered.values);
    scores.stage = stage;
    const auto& c = scores.contributions;
    const double mean = c.mean();
    const double sd = std::sqrt((c.array() - mean).square().mean());
    const double threshold = mean + rule.std_multiplier * sd;

    // Bitwise-equal scores can still straddle a rounded mean.
    const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
    if (c.maxCoeff() - c.minCoeff() <= 1e-12 * scale) {
      result.stopped_early = true;
      result.stop_reason = "all features score equally; nothing to remove";
      break;
    }

    std::vector<std::size_t> keep_local;
    std::vector<std::size_t> drop_local;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      (c(i) > threshold ? keep_local : drop_local).push_back(static_cast<std::size_t>(i));
    }
    if (drop_local.empty()) {
      result.stopped_early = true;
      result.stop_reason = "retention rule keeps every feature";
      break;
    }
    if (keep_local.size() < 2) {
      result.stopped_early = true;
      result.stop_reason = "retention rule would leave fewer than two features";
      break;
    }

    FilterStageReport report;
    report.stage = stage;
    report.entropy_before = scores.entropy_full;
    report.threshold = threshold;
    for (auto i : drop_local) {
      report.removed.push_back(result.kept[i]);
      if (!result.filtered.feature_names.empty()) {
        report.removed_names.push_back(result.filtered.feature_names[i]);
      }
    }
    std::vector<std::size_t> kept_global;
    for (auto i : keep_local) kept_global.push_back(result.kept[i]);

    result.filtered = result.filtered.select_cols(keep_local);
    result.kept = std::move(kept_global);
    report.survivors = result.kept;
    report.entropy_after = svd_entropy(result.filtered.values);
    result.stages.push_back(std::move(report));
  }
  return result;
}

}  // namespace dqc
