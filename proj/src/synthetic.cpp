#include "dqc/synthetic.hpp"

#include <cmath>
#include <random>
#include <string>

#include "dqc/errors.hpp"
#include "dqc/random.hpp"

namespace dqc {

DataMatrix make_blobs(const Eigen::MatrixXd& centers, std::size_t per_blob, double spread,
                      std::uint64_t seed) {
  if (centers.rows() < 1 || centers.cols() < 1) throw ArgumentError("need at least one centre");
  if (per_blob < 1) throw ArgumentError("need at least one point per blob");
  if (!(spread >= 0.0)) throw ArgumentError("spread must be non-negative");

  std::mt19937_64 rng(seed);
  const auto m = static_cast<Eigen::Index>(per_blob);
  DataMatrix out;
  out.values.resize(centers.rows() * m, centers.cols());
  out.labels.emplace();
  for (Eigen::Index b = 0; b < centers.rows(); ++b) {
    const Eigen::MatrixXd noise = standard_normals(m, centers.cols(), rng) * spread;
    for (Eigen::Index i = 0; i < m; ++i) {
      out.values.row(b * m + i) = centers.row(b) + noise.row(i);
      out.labels->push_back("blob" + std::to_string(b));
    }
  }
  for (Eigen::Index c = 0; c < centers.cols(); ++c) {
    out.feature_names.push_back("x" + std::to_string(c + 1));
  }
  return out;
}

DataMatrix make_three_blobs(std::size_t per_blob, double spread, std::uint64_t seed, double radius,
                            Eigen::Vector2d offset) {
  const double pi = std::acos(-1.0);
  Eigen::MatrixXd centers(3, 2);
  for (int b = 0; b < 3; ++b) {
    const double angle = pi / 2.0 + b * 2.0 * pi / 3.0;
    centers.row(b) << offset.x() + radius * std::cos(angle), offset.y() + radius * std::sin(angle);
  }
  return make_blobs(centers, per_blob, spread, seed);
}

DataMatrix make_ring(std::size_t n, double radius, double noise, std::uint64_t seed,
                     Eigen::Vector2d offset) {
  if (n < 1) throw ArgumentError("ring needs at least one point");
  std::mt19937_64 rng(seed);
  const double two_pi = 2.0 * std::acos(-1.0);
  DataMatrix out;
  out.values.resize(static_cast<Eigen::Index>(n), 2);
  out.labels.emplace(n, "ring");
  out.feature_names = {"x1", "x2"};
  for (Eigen::Index i = 0; i < out.values.rows(); ++i) {
    const double t = two_pi * unit_uniform(rng);
    const double r = radius + noise * standard_normals(1, 1, rng)(0, 0);
    out.values.row(i) << offset.x() + r * std::cos(t), offset.y() + r * std::sin(t);
  }
  return out;
}

}  // namespace dqc
