#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace dqc {

/// Portable uniform in (0, 1): mt19937_64 output is fixed by the standard,
/// the distribution classes are not.
inline double unit_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Matrix of independent standard normals (Box-Muller), filled column-major.
Eigen::MatrixXd standard_normals(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng);
Eigen::MatrixXd standard_normals(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);

}  // namespace dqc
