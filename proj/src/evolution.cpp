#include "dqc/evolution.hpp"

#include <algorithm>
#include <cmath>

#include "dqc/errors.hpp"

namespace dqc {

namespace {

using Complex = std::complex<double>;

// Per-column c^dagger A c for a real symmetric A.
Eigen::VectorXd quadratic_forms(const Eigen::MatrixXd& a, const Eigen::MatrixXcd& c) {
  const Eigen::MatrixXcd ac = a * c;
  return (c.conjugate().cwiseProduct(ac)).colwise().sum().real().transpose();
}

}  // namespace

void EvolutionParams::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ArgumentError("dt must be positive");
  if (steps < 1) throw ArgumentError("steps must be at least 1");
  if (stages < 1) throw ArgumentError("stages must be at least 1");
  if (!(sigma_stage_factor > 0.0)) throw ArgumentError("sigma stage factor must be positive");
  if (early_stop && !(early_stop_fraction > 0.0)) {
    throw ArgumentError("early stop fraction must be positive");
  }
}

Propagator build_propagator(const Eigen::MatrixXd& h_orth, double dt) {
  if (h_orth.rows() != h_orth.cols() || h_orth.rows() < 1) {
    throw ArgumentError("Hamiltonian must be square and non-empty");
  }
  if (!h_orth.allFinite()) throw ArgumentError("Hamiltonian has non-finite entries");
  if (!(dt > 0.0)) throw ArgumentError("dt must be positive");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (h_orth + h_orth.transpose()));
  if (eig.info() != Eigen::Success) throw NumericalError("Hamiltonian eigendecomposition failed");

  Propagator p;
  p.dt = dt;
  p.energies = eig.eigenvalues();
  p.eigenvectors = eig.eigenvectors();
  Eigen::VectorXcd phase(p.energies.size());
  for (Eigen::Index a = 0; a < phase.size(); ++a) {
    phase(a) = std::exp(Complex(0.0, -p.energies(a) * dt));
  }
  const Eigen::MatrixXcd w = p.eigenvectors.cast<Complex>();
  p.U = w * phase.asDiagonal() * w.transpose();
  return p;
}

Eigen::MatrixXd to_orthonormal(const QuantumModel& model, const Eigen::MatrixXd& a) {
  const Eigen::MatrixXd& t = model.basis.T;
  const Eigen::MatrixXd r = t.transpose() * a * t;
  return 0.5 * (r + r.transpose());
}

Propagator build_propagator(const QuantumModel& model, double dt) {
  return build_propagator(to_orthonormal(model, model.hamiltonian), dt);
}

Eigen::MatrixXcd project_states(const QuantumModel& model, const Eigen::MatrixXd& centers) {
  if (centers.cols() != static_cast<Eigen::Index>(model.dim())) {
    throw ArgumentError("state centres have the wrong dimension");
  }
  const Eigen::MatrixXd overlaps = cross_gram(model.points.coords, centers, model.params.sigma);
  return (model.basis.T.transpose() * overlaps).cast<Complex>();
}

EvolutionRun evolve_states(const QuantumModel& model, const Eigen::MatrixXcd& initial,
                           const EvolutionParams& params, const FrameCallback& on_frame) {
  params.validate();
  const auto q = static_cast<Eigen::Index>(model.basis.size());
  if (initial.rows() != q) throw ArgumentError("initial amplitudes do not match the basis size");

  const Eigen::MatrixXd h = to_orthonormal(model, model.hamiltonian);
  std::vector<Eigen::MatrixXd> xs;
  xs.reserve(model.position.size());
  for (const auto& x : model.position) xs.push_back(to_orthonormal(model, x));
  const Propagator prop = build_propagator(h, params.dt);

  EvolutionRun run;
  run.propagator = prop.U;
  run.coefficients = initial;

  const Eigen::Index k = initial.cols();
  auto snapshot = [&](const Eigen::MatrixXcd& c) {
    const Eigen::VectorXd norms = (c.conjugate().cwiseProduct(c)).colwise().sum().real().transpose();
    Eigen::MatrixXd pos(k, static_cast<Eigen::Index>(xs.size()));
    for (std::size_t dim = 0; dim < xs.size(); ++dim) {
      pos.col(static_cast<Eigen::Index>(dim)) = quadratic_forms(xs[dim], c).cwiseQuotient(norms);
    }
    run.trajectory.push_back(std::move(pos));
    run.energies.push_back(quadratic_forms(h, c).cwiseQuotient(norms));
    run.norms.push_back(norms);
    if (on_frame) on_frame(run.trajectory.size() - 1, run.trajectory.back(), run.norms.back());
  };

  snapshot(run.coefficients);
  if ((run.norms.front().array() <= 0.0).any()) {
    throw ArgumentError("an initial state has no component in the basis");
  }

  const double stop_below =
      params.early_stop ? params.early_stop_fraction * diameter(run.trajectory.front()) : 0.0;

  for (std::size_t step = 1; step <= params.steps; ++step) {
    run.coefficients = prop.U * run.coefficients;
    snapshot(run.coefficients);
    run.steps_taken = step;

    const auto& now = run.norms[step];
    const auto& before = run.norms[step - 1];
    for (Eigen::Index i = 0; i < k; ++i) {
      if (std::abs(now(i) - before(i)) > 1e-6 * before(i)) {
        throw NumericalError("norm of state " + std::to_string(i) + " drifted at step " +
                             std::to_string(step));
      }
    }
    if (params.early_stop) {
      const double moved =
          (run.trajectory[step] - run.trajectory[step - 1]).rowwise().norm().mean();
      if (moved < stop_below) {
        run.stopped_early = true;
        break;
      }
    }
  }
  return run;
}

EvolutionRun evolve(const QuantumModel& model, const EvolutionParams& params,
                    const FrameCallback& on_frame) {
  return evolve_states(model, project_states(model, model.points.coords), params, on_frame);
}

std::vector<PointSet> iterate_dqc(const PointSet& points, const ModelParams& model_params,
                                  const EvolutionParams& evo_params,
                                  const StageFrameCallback& on_frame) {
  evo_params.validate();
  std::vector<PointSet> out;
  out.reserve(evo_params.stages);
  PointSet current = points;
  ModelParams params = model_params;
  for (std::size_t stage = 1; stage <= evo_params.stages; ++stage) {
    if (stage > 1) params.sigma *= evo_params.sigma_stage_factor;
    const QuantumModel model = build_model(current, params);
    FrameCallback frame;
    if (on_frame) {
      frame = [&](std::size_t step, const Eigen::MatrixXd& pos, const Eigen::VectorXd& norms) {
        on_frame(stage, step, pos, norms);
      };
    }
    const EvolutionRun run = evolve(model, evo_params, frame);
    current = current.with_coords(run.final_positions());
    out.push_back(current);
  }
  return out;
}

RepresentativeSet select_representatives(const PointSet& points, double sigma, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ArgumentError("threshold must lie in (0, 1)");
  if (!(sigma > 0.0)) throw ArgumentError("sigma must be positive");

  const Eigen::MatrixXd& x = points.coords;
  const Eigen::Index n = x.rows();
  const double inv = 1.0 / (4.0 * sigma * sigma);
  auto overlap = [&](Eigen::Index a, Eigen::Index b) {
    const double v = std::exp(-(x.row(a) - x.row(b)).squaredNorm() * inv);
    return v < kGramClamp ? 0.0 : v;
  };

  // Row s of the Cholesky factor of the kept Gram block, lower triangle packed.
  std::vector<Eigen::VectorXd> chol;
  RepresentativeSet reps;
  reps.overlap_threshold = threshold;

  auto solve_lower = [&](const Eigen::VectorXd& rhs) {
    Eigen::VectorXd y(rhs.size());
    for (Eigen::Index s = 0; s < rhs.size(); ++s) {
      double acc = rhs(s);
      for (Eigen::Index t = 0; t < s; ++t) acc -= chol[static_cast<std::size_t>(s)](t) * y(t);
      y(s) = acc / chol[static_cast<std::size_t>(s)](s);
    }
    return y;
  };
  auto overlaps_with_kept = [&](Eigen::Index i) {
    Eigen::VectorXd k(static_cast<Eigen::Index>(reps.indices.size()));
    for (std::size_t s = 0; s < reps.indices.size(); ++s) {
      k(static_cast<Eigen::Index>(s)) = overlap(static_cast<Eigen::Index>(reps.indices[s]), i);
    }
    return k;
  };

  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd y = solve_lower(overlaps_with_kept(i));
    const double residual = 1.0 - y.squaredNorm();
    if (residual > threshold) {
      Eigen::VectorXd row(y.size() + 1);
      row.head(y.size()) = y;
      row(y.size()) = std::sqrt(residual);
      chol.push_back(std::move(row));
      reps.indices.push_back(static_cast<std::size_t>(i));
    }
  }

  const auto m = static_cast<Eigen::Index>(reps.indices.size());
  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index s = 0; s < m; ++s) {
    lower.row(s).head(s + 1) = chol[static_cast<std::size_t>(s)].transpose();
  }
  reps.projection = Eigen::MatrixXd::Zero(m, n);
  reps.residuals = Eigen::VectorXd::Zero(n);
  std::size_t next_member = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (next_member < reps.indices.size() &&
        reps.indices[next_member] == static_cast<std::size_t>(i)) {
      reps.projection(static_cast<Eigen::Index>(next_member), i) = 1.0;
      ++next_member;
      continue;
    }
    const Eigen::VectorXd y = lower.triangularView<Eigen::Lower>().solve(overlaps_with_kept(i));
    reps.projection.col(i) = lower.transpose().triangularView<Eigen::Upper>().solve(y);
    reps.residuals(i) = std::max(0.0, 1.0 - y.squaredNorm());
  }
  return reps;
}

QuantumModel build_subset_model(const PointSet& points, const RepresentativeSet& reps,
                                const ModelParams& params) {
  if (reps.indices.empty()) throw ArgumentError("representative set is empty");
  return build_model(points.select(reps.indices), params, points.coords);
}

EvolutionRun evolve_with_projection(const PointSet& points, const RepresentativeSet& reps,
                                    const QuantumModel& reps_model, const EvolutionParams& params,
                                    double tolerance, const FrameCallback& on_frame) {
  if (reps.residuals.size() != static_cast<Eigen::Index>(points.size())) {
    throw ArgumentError("representative set was built for a different point set");
  }
  if (reps_model.size() != reps.indices.size()) {
    throw ArgumentError("model was not built on the representative points");
  }
  if (tolerance < 0.0) tolerance = reps.overlap_threshold;

  EvolutionRun run =
      evolve_states(reps_model, project_states(reps_model, points.coords), params, on_frame);
  for (Eigen::Index i = 0; i < reps.residuals.size(); ++i) {
    if (reps.residuals(i) > tolerance) run.residual_warnings.push_back(static_cast<std::size_t>(i));
  }
  return run;
}

}  // namespace dqc
