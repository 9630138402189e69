#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "dqc/data.hpp"

namespace dqc {

using PotentialFn = std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)>;

/// How <psi_i|V|psi_j> is approximated. The product psi_i * psi_j is a
/// Gaussian of width sigma/sqrt(2) about the pair midpoint, scaled by N_ij.
enum class PotentialRule {
  kMidpoint,  // N_ij * V(midpoint)
  kSampled,   // N_ij * mean of V over samples of that product Gaussian
};

struct ModelParams {
  double sigma = 0.1;
  double mass = 1.0;
  double basis_cutoff = 1e-6;  // relative to the largest Gram eigenvalue
  PotentialRule potential_rule = PotentialRule::kMidpoint;
  std::size_t potential_samples = 64;
  std::uint64_t seed = 20090101;

  void validate() const;
};

/// Overlaps below this are stored as exact zeros.
inline constexpr double kGramClamp = 1e-40;

/// Parzen estimator: sum_i exp(-|x - x_i|^2 / (2 sigma^2)).
double parzen(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::MatrixXd& points, double sigma);

struct PotentialProbe {
  double value = 0.0;
  /// The plain Parzen sum underflows at this probe; the value then follows
  /// the quadratic bowl of the nearest point.
  bool asymptotic = false;
};

/// V(x) = (sigma^2 / 2) * laplacian(psi) / psi, the potential for which the
/// Parzen estimator solves (-sigma^2/2 laplacian + V) psi = 0. Closed form:
///   V = -d/2 + sum_i r_i^2 e_i / (2 sigma^2 sum_i e_i).
/// Evaluated with weights shifted by the nearest point so it never divides
/// by an underflowed sum.
PotentialProbe potential_probe(const Eigen::Ref<const Eigen::VectorXd>& x,
                               const Eigen::MatrixXd& points, double sigma);
double potential(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::MatrixXd& points,
                 double sigma);

/// The data-derived potential as a callable over a private copy of the points.
PotentialFn parzen_potential(Eigen::MatrixXd points, double sigma);

/// Overlaps <psi_a|psi_b> = exp(-|a - b|^2 / (4 sigma^2)) of unit-normalized
/// width-sigma Gaussians, rows of `a` against rows of `b`.
Eigen::MatrixXd cross_gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double sigma);
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& points, double sigma);

/// <psi_i| -laplacian / (2m) |psi_j> = N_ij / (2m) * (d / (2 sigma^2) - r_ij^2 / (4 sigma^4)).
Eigen::MatrixXd kinetic_matrix(const Eigen::MatrixXd& points, double sigma, double mass);

/// <psi_i|V|psi_j> under the configured rule. Zero where the overlap is clamped.
Eigen::MatrixXd potential_matrix(const Eigen::MatrixXd& points, const ModelParams& params,
                                 const PotentialFn& v);

/// (X_k)_ij = N_ij * (x_ik + x_jk) / 2, one matrix per coordinate axis.
std::vector<Eigen::MatrixXd> position_matrices(const Eigen::MatrixXd& points, double sigma);

/// Columns v_a / sqrt(lambda_a) for Gram eigenpairs with lambda_a > cutoff * lambda_max,
/// so that T^T N T = I. Eigenvalues descend; each eigenvector has its
/// largest-magnitude entry positive.
struct BasisTransform {
  Eigen::MatrixXd T;            // n x q
  Eigen::VectorXd eigenvalues;  // q retained eigenvalues
  std::size_t size() const { return static_cast<std::size_t>(T.cols()); }
};

BasisTransform orthonormal_basis(const Eigen::MatrixXd& gram, double cutoff);

/// Everything needed to evolve states spanned by Gaussians centred on
/// `points`. Immutable once built.
struct QuantumModel {
  PointSet points;
  ModelParams params;
  Eigen::MatrixXd gram;
  Eigen::MatrixXd kinetic;
  Eigen::MatrixXd potential;
  Eigen::MatrixXd hamiltonian;
  std::vector<Eigen::MatrixXd> position;
  BasisTransform basis;

  std::size_t size() const { return points.size(); }
  std::size_t dim() const { return points.dim(); }
};

/// Model whose potential comes from the Parzen estimator over its own points.
QuantumModel build_model(const PointSet& points, const ModelParams& params);
/// Basis on `points`, potential from the Parzen estimator over `potential_points`.
QuantumModel build_model(const PointSet& points, const ModelParams& params,
                         const Eigen::MatrixXd& potential_points);
/// Basis on `points`, caller-supplied potential.
QuantumModel build_model(const PointSet& points, const ModelParams& params, const PotentialFn& v);

/// H assembled from parts already computed for the same points and width.
Eigen::MatrixXd hamiltonian_matrix(const Eigen::MatrixXd& points, const Eigen::MatrixXd& gram,
                                   const ModelParams& params, const PotentialFn& v);

}  // namespace dqc
