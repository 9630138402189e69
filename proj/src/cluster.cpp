#include "dqc/cluster.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

#include "dqc/data.hpp"
#include "dqc/errors.hpp"

namespace dqc {

namespace {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

double pairs(double count) { return count * (count - 1.0) / 2.0; }

}  // namespace

ClusterResult extract_clusters(const Eigen::MatrixXd& coords, double epsilon) {
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
  const auto n = static_cast<std::size_t>(coords.rows());
  DisjointSets sets(n);
  const double eps2 = epsilon * epsilon;
  for (Eigen::Index i = 0; i < coords.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < coords.rows(); ++j) {
      if ((coords.row(i) - coords.row(j)).squaredNorm() <= eps2) {
        sets.unite(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      }
    }
  }

  ClusterResult result;
  result.epsilon = epsilon;
  result.labels.resize(n);
  std::unordered_map<std::size_t, int> ids;
  for (std::size_t i = 0; i < n; ++i) {
    const auto root = sets.find(i);
    const auto [it, inserted] = ids.try_emplace(root, static_cast<int>(ids.size()));
    result.labels[i] = it->second;
  }
  result.n_clusters = ids.size();
  return result;
}

double default_epsilon(const Eigen::MatrixXd& coords, double fraction) {
  if (!(fraction > 0.0)) throw ArgumentError("epsilon fraction must be positive");
  return std::max(fraction * diameter(coords), 1e-12);
}

double jaccard_score(const std::vector<int>& predicted, const std::vector<int>& expert) {
  if (predicted.size() != expert.size()) throw ArgumentError("label vectors differ in length");
  if (predicted.size() < 2) throw ArgumentError("Jaccard score needs at least two points");

  // Contingency counts give the pair totals without enumerating pairs.
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> pred_sizes;
  std::map<int, double> expert_sizes;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    joint[{predicted[i], expert[i]}] += 1.0;
    pred_sizes[predicted[i]] += 1.0;
    expert_sizes[expert[i]] += 1.0;
  }
  double both = 0.0;
  for (const auto& [key, c] : joint) both += pairs(c);
  double in_pred = 0.0;
  for (const auto& [key, c] : pred_sizes) in_pred += pairs(c);
  double in_expert = 0.0;
  for (const auto& [key, c] : expert_sizes) in_expert += pairs(c);

  const double denom = in_pred + in_expert - both;  // n11 + n01 + n10
  if (denom == 0.0) return 1.0;
  return both / denom;
}

std::vector<int> encode_labels(const std::vector<std::string>& labels) {
  std::unordered_map<std::string, int> ids;
  std::vector<int> out;
  out.reserve(labels.size());
  for (const auto& l : labels) {
    out.push_back(ids.try_emplace(l, static_cast<int>(ids.size())).first->second);
  }
  return out;
}

}  // namespace dqc
