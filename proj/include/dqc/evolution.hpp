#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dqc/data.hpp"
#include "dqc/model.hpp"

namespace dqc {

struct EvolutionParams {
  double dt = 0.1;
  std::size_t steps = 40;   // per stage
  std::size_t stages = 1;
  /// End a stage once the mean centroid displacement in one step drops below
  /// early_stop_fraction times the stage's initial data diameter.
  bool early_stop = false;
  double early_stop_fraction = 1e-4;
  /// Width used by stage s is sigma * sigma_stage_factor^(s-1).
  double sigma_stage_factor = 1.0;

  void validate() const;
};

/// e^{-i H dt} in the orthonormal truncated basis, with the eigensystem it
/// was built from.
struct Propagator {
  Eigen::MatrixXcd U;
  Eigen::VectorXd energies;      // eigenvalues of H_orth, ascending
  Eigen::MatrixXd eigenvectors;  // columns W
  double dt = 0.0;
};

Propagator build_propagator(const Eigen::MatrixXd& h_orth, double dt);
Propagator build_propagator(const QuantumModel& model, double dt);

/// T^T A T, symmetrized.
Eigen::MatrixXd to_orthonormal(const QuantumModel& model, const Eigen::MatrixXd& a);

/// Amplitudes (q x k) of unit Gaussians centred on the rows of `centers`,
/// projected into the model's orthonormal basis: T^T N(basis, centers).
Eigen::MatrixXcd project_states(const QuantumModel& model, const Eigen::MatrixXd& centers);

struct EvolutionRun {
  Eigen::MatrixXcd propagator;
  Eigen::MatrixXcd coefficients;           // q x n, amplitudes after the last step
  std::vector<Eigen::MatrixXd> trajectory; // one n x r centroid snapshot per step, step 0 first
  std::vector<Eigen::VectorXd> norms;      // squared norms c^dagger c per snapshot
  std::vector<Eigen::VectorXd> energies;   // <H> per state per snapshot
  std::size_t steps_taken = 0;
  bool stopped_early = false;
  /// States whose projection residual exceeded tolerance (projection path only).
  std::vector<std::size_t> residual_warnings;

  const Eigen::MatrixXd& final_positions() const { return trajectory.back(); }
};

/// Observes each snapshot as it is produced: (step, positions, norms).
using FrameCallback =
    std::function<void(std::size_t, const Eigen::MatrixXd&, const Eigen::VectorXd&)>;

/// Evolves arbitrary initial amplitudes (q x k) under the model Hamiltonian and
/// reads out position expectations <X_k> / <1> at every step.
EvolutionRun evolve_states(const QuantumModel& model, const Eigen::MatrixXcd& initial,
                           const EvolutionParams& params, const FrameCallback& on_frame = {});

/// Evolves the Gaussian of every model point. Throws NumericalError naming the
/// step if any squared norm drifts by more than 1e-6 in one step.
EvolutionRun evolve(const QuantumModel& model, const EvolutionParams& params,
                    const FrameCallback& on_frame = {});

/// Observes each stage's frames: (stage, step, positions, norms).
using StageFrameCallback = std::function<void(std::size_t, std::size_t, const Eigen::MatrixXd&,
                                              const Eigen::VectorXd&)>;

/// Stop-and-restart DQC. Stage s rebuilds the model on the final centroids of
/// stage s-1. Returns the final point set of every stage; ids, labels and
/// degenerate flags carry through unchanged.
std::vector<PointSet> iterate_dqc(const PointSet& points, const ModelParams& model_params,
                                  const EvolutionParams& evo_params,
                                  const StageFrameCallback& on_frame = {});

/// Greedy subset whose Gaussians represent every other point's Gaussian to
/// within `threshold` squared residual norm.
struct RepresentativeSet {
  std::vector<std::size_t> indices;    // ascending, in scan order
  double overlap_threshold = 0.0;
  Eigen::MatrixXd projection;          // |S| x n, psi_i ~ sum_s projection(s, i) psi_s
  Eigen::VectorXd residuals;           // squared residual norm per point (0 for members)
};

/// Scans points in input order and keeps point i when the squared norm of its
/// Gaussian's component orthogonal to the already-kept Gaussians exceeds
/// `threshold`. Uses an incrementally extended Cholesky factor of the kept
/// Gram block.
RepresentativeSet select_representatives(const PointSet& points, double sigma, double threshold);

/// Model on the representative points with the potential built from all points.
QuantumModel build_subset_model(const PointSet& points, const RepresentativeSet& reps,
                                const ModelParams& params);

/// Evolves every point by expanding its Gaussian in the representatives'
/// basis. States whose residual exceeds `tolerance` (default: the selection
/// threshold) are listed in EvolutionRun::residual_warnings.
EvolutionRun evolve_with_projection(const PointSet& points, const RepresentativeSet& reps,
                                    const QuantumModel& reps_model, const EvolutionParams& params,
                                    double tolerance = -1.0, const FrameCallback& on_frame = {});

}  // namespace dqc
