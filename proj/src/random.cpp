#include "dqc/random.hpp"

#include <cmath>

namespace dqc {

Eigen::MatrixXd standard_normals(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  Eigen::MatrixXd z(rows, cols);
  const double two_pi = 2.0 * std::acos(-1.0);
  for (Eigen::Index k = 0; k < z.size(); k += 2) {
    const double r = std::sqrt(-2.0 * std::log(unit_uniform(rng)));
    const double t = two_pi * unit_uniform(rng);
    z(k) = r * std::cos(t);
    if (k + 1 < z.size()) z(k + 1) = r * std::sin(t);
  }
  return z;
}

Eigen::MatrixXd standard_normals(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return standard_normals(rows, cols, rng);
}

}  // namespace dqc
