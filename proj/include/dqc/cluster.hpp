#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dqc {

struct ClusterResult {
  std::vector<int> labels;  // 0-based, contiguous, numbered by first member
  double epsilon = 0.0;
  std::size_t n_clusters = 0;
  std::optional<double> jaccard;
};

/// Single-linkage clusters: connected components of the graph joining every
/// pair of rows no farther apart than epsilon.
ClusterResult extract_clusters(const Eigen::MatrixXd& coords, double epsilon);

/// epsilon = fraction * diameter, floored at a tiny positive value so a
/// collapsed point set still has a valid threshold.
double default_epsilon(const Eigen::MatrixXd& coords, double fraction = 0.05);

/// Pair-counting similarity n11 / (n11 + n10 + n01) over unordered pairs.
/// Two partitions with no co-clustered pair at all score 1.
double jaccard_score(const std::vector<int>& predicted, const std::vector<int>& expert);

/// Maps arbitrary category names to 0-based ids in order of first appearance.
std::vector<int> encode_labels(const std::vector<std::string>& labels);

}  // namespace dqc
