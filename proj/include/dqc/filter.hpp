#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dqc/data.hpp"

namespace dqc {

/// Normalized Shannon entropy of the squared-singular-value shares,
///   E = -(1 / log K) * sum_j rho_j log rho_j,  rho_j = S_j^2 / sum_k S_k^2,
/// with K = min(n, d). E lies in [0, 1]; a matrix with K == 1 has E = 0.
/// Throws UndefinedEntropyError for an all-zero matrix.
double svd_entropy(const Eigen::MatrixXd& m);
double svd_entropy(const DataMatrix& m);

struct FeatureScores {
  Eigen::VectorXd contributions;  // E(m) - E(m without feature i)
  double entropy_full = 0.0;
  std::size_t stage = 0;
};

/// Leave-one-out entropy contribution of every column. Requires d >= 2.
FeatureScores feature_contributions(const Eigen::MatrixXd& m);
FeatureScores feature_contributions(const DataMatrix& m);

/// Keeps features whose contribution exceeds mean + std_multiplier * std.
struct RetentionRule {
  double std_multiplier = 0.0;
};

struct FilterStageReport {
  std::size_t stage = 0;                    // 1-based
  std::vector<std::size_t> removed;         // indices into the ORIGINAL columns
  std::vector<std::string> removed_names;
  std::vector<std::size_t> survivors;       // original indices after this stage
  double entropy_before = 0.0;
  double entropy_after = 0.0;
  double threshold = 0.0;
};

struct FilterResult {
  DataMatrix filtered;
  std::vector<std::size_t> kept;            // original column indices, ascending
  std::vector<FilterStageReport> stages;    // only stages that removed something
  bool stopped_early = false;
  std::string stop_reason;
};

/// Runs up to `stages` rounds of score-and-prune. A round that would keep
/// every feature, or leave fewer than two, ends the run early instead.
FilterResult filter_features(const DataMatrix& m, std::size_t stages, const RetentionRule& rule = {});

}  // namespace dqc
