#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

#include "dqc/data.hpp"

namespace dqc {

/// Isotropic Gaussian blobs, `per_blob` points around each row of `centers`,
/// labelled "blob0", "blob1", ... in generation order.
DataMatrix make_blobs(const Eigen::MatrixXd& centers, std::size_t per_blob, double spread,
                      std::uint64_t seed);

/// Three blobs in the plane at angles 90, 210 and 330 degrees on a circle of
/// `radius` about `offset`.
DataMatrix make_three_blobs(std::size_t per_blob, double spread, std::uint64_t seed,
                            double radius = 1.0, Eigen::Vector2d offset = Eigen::Vector2d::Zero());

/// Points spread uniformly in angle around a circle with Gaussian radial noise.
/// A single class "ring": no cluster structure.
DataMatrix make_ring(std::size_t n, double radius, double noise, std::uint64_t seed,
                     Eigen::Vector2d offset = Eigen::Vector2d::Zero());

}  // namespace dqc
