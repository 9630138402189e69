#include "dqc/model.hpp"

#include <cmath>
#include <limits>

#include "dqc/errors.hpp"
#include "dqc/random.hpp"

namespace dqc {

namespace {

void require_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ArgumentError("sigma must be positive");
}

Eigen::MatrixXd kinetic_from_gram(const Eigen::MatrixXd& points, const Eigen::MatrixXd& gram,
                                  double sigma, double mass) {
  const Eigen::Index n = points.rows();
  const double d = static_cast<double>(points.cols());
  const double s2 = sigma * sigma;
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double r2 = (points.row(i) - points.row(j)).squaredNorm();
      const double v = gram(i, j) / (2.0 * mass) * (d / (2.0 * s2) - r2 / (4.0 * s2 * s2));
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

void orient_columns(Eigen::MatrixXd& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    Eigen::Index pivot = 0;
    m.col(c).cwiseAbs().maxCoeff(&pivot);
    if (m(pivot, c) < 0) m.col(c) *= -1.0;
  }
}

}  // namespace

void ModelParams::validate() const {
  require_sigma(sigma);
  if (!(mass > 0.0) || !std::isfinite(mass)) throw ArgumentError("mass must be positive");
  if (!(basis_cutoff > 0.0 && basis_cutoff < 1.0)) {
    throw ArgumentError("basis cutoff must lie in (0, 1)");
  }
  if (potential_rule == PotentialRule::kSampled && potential_samples < 1) {
    throw ArgumentError("sampled potential rule needs at least one sample");
  }
}

double parzen(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::MatrixXd& points,
              double sigma) {
  require_sigma(sigma);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  double psi = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    psi += std::exp(-(x.transpose() - points.row(i)).squaredNorm() * inv);
  }
  return psi;
}

PotentialProbe potential_probe(const Eigen::Ref<const Eigen::VectorXd>& x,
                               const Eigen::MatrixXd& points, double sigma) {
  require_sigma(sigma);
  if (points.rows() < 1) throw ArgumentError("potential needs at least one point");
  if (x.size() != points.cols()) throw ArgumentError("probe dimension does not match points");

  const Eigen::Index n = points.rows();
  const double inv = 1.0 / (2.0 * sigma * sigma);
  Eigen::VectorXd r2(n);
  for (Eigen::Index i = 0; i < n; ++i) r2(i) = (x.transpose() - points.row(i)).squaredNorm();
  const double r2min = r2.minCoeff();

  double weight = 0.0;
  double moment = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = std::exp(-(r2(i) - r2min) * inv);
    weight += w;
    moment += r2(i) * w;
  }
  PotentialProbe probe;
  probe.value = -0.5 * static_cast<double>(points.cols()) + moment * inv / weight;
  probe.asymptotic = r2min * inv > -std::log(std::numeric_limits<double>::min());
  return probe;
}

double potential(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::MatrixXd& points,
                 double sigma) {
  return potential_probe(x, points, sigma).value;
}

PotentialFn parzen_potential(Eigen::MatrixXd points, double sigma) {
  require_sigma(sigma);
  return [pts = std::move(points), sigma](const Eigen::Ref<const Eigen::VectorXd>& x) {
    return potential(x, pts, sigma);
  };
}

Eigen::MatrixXd cross_gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double sigma) {
  require_sigma(sigma);
  if (a.cols() != b.cols()) throw ArgumentError("point dimensions differ");
  const double inv = 1.0 / (4.0 * sigma * sigma);
  Eigen::MatrixXd g(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const double v = std::exp(-(a.row(i) - b.row(j)).squaredNorm() * inv);
      g(i, j) = v < kGramClamp ? 0.0 : v;
    }
  }
  return g;
}

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& points, double sigma) {
  require_sigma(sigma);
  const double inv = 1.0 / (4.0 * sigma * sigma);
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double v = std::exp(-(points.row(i) - points.row(j)).squaredNorm() * inv);
      if (v < kGramClamp) v = 0.0;
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

Eigen::MatrixXd kinetic_matrix(const Eigen::MatrixXd& points, double sigma, double mass) {
  if (!(mass > 0.0)) throw ArgumentError("mass must be positive");
  return kinetic_from_gram(points, gram_matrix(points, sigma), sigma, mass);
}

Eigen::MatrixXd potential_matrix(const Eigen::MatrixXd& points, const ModelParams& params,
                                 const PotentialFn& v) {
  params.validate();
  const Eigen::MatrixXd gram = gram_matrix(points, params.sigma);
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();

  Eigen::MatrixXd offsets;
  if (params.potential_rule == PotentialRule::kSampled) {
    offsets = standard_normals(static_cast<Eigen::Index>(params.potential_samples), d, params.seed) *
              (params.sigma / std::sqrt(2.0));
  }

  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd mid(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      if (gram(i, j) == 0.0) continue;
      mid = 0.5 * (points.row(i) + points.row(j)).transpose();
      double mean_v = 0.0;
      if (params.potential_rule == PotentialRule::kMidpoint) {
        mean_v = v(mid);
      } else {
        for (Eigen::Index s = 0; s < offsets.rows(); ++s) {
          mean_v += v(mid + offsets.row(s).transpose());
        }
        mean_v /= static_cast<double>(offsets.rows());
      }
      p(i, j) = gram(i, j) * mean_v;
      p(j, i) = p(i, j);
    }
  }
  return p;
}

std::vector<Eigen::MatrixXd> position_matrices(const Eigen::MatrixXd& points, double sigma) {
  const Eigen::MatrixXd gram = gram_matrix(points, sigma);
  const Eigen::Index n = points.rows();
  std::vector<Eigen::MatrixXd> xs;
  xs.reserve(static_cast<std::size_t>(points.cols()));
  for (Eigen::Index k = 0; k < points.cols(); ++k) {
    Eigen::MatrixXd x(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) {
        x(i, j) = gram(i, j) * 0.5 * (points(i, k) + points(j, k));
        x(j, i) = x(i, j);
      }
    }
    xs.push_back(std::move(x));
  }
  return xs;
}

BasisTransform orthonormal_basis(const Eigen::MatrixXd& gram, double cutoff) {
  if (gram.rows() != gram.cols() || gram.rows() < 1) {
    throw ArgumentError("Gram matrix must be square and non-empty");
  }
  if (!(cutoff > 0.0 && cutoff < 1.0)) throw ArgumentError("basis cutoff must lie in (0, 1)");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) throw NumericalError("Gram eigendecomposition failed");
  // Eigen returns ascending order.
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const Eigen::Index n = lambda.size();
  const double lmax = lambda(n - 1);
  if (!(lmax > 0.0)) throw DegenerateBasisError("Gram matrix has no positive eigenvalue");

  Eigen::Index q = 0;
  while (q < n && lambda(n - 1 - q) > cutoff * lmax) ++q;
  if (q == 0) throw DegenerateBasisError("every Gram eigenvalue is below the cutoff");

  BasisTransform b;
  b.T.resize(n, q);
  b.eigenvalues.resize(q);
  for (Eigen::Index a = 0; a < q; ++a) {
    b.eigenvalues(a) = lambda(n - 1 - a);
    b.T.col(a) = eig.eigenvectors().col(n - 1 - a);
  }
  orient_columns(b.T);
  for (Eigen::Index a = 0; a < q; ++a) b.T.col(a) /= std::sqrt(b.eigenvalues(a));
  return b;
}

Eigen::MatrixXd hamiltonian_matrix(const Eigen::MatrixXd& points, const Eigen::MatrixXd& gram,
                                   const ModelParams& params, const PotentialFn& v) {
  params.validate();
  if (gram.rows() != points.rows() || gram.cols() != points.rows()) {
    throw ArgumentError("Gram matrix shape does not match the point count");
  }
  Eigen::MatrixXd h = kinetic_from_gram(points, gram, params.sigma, params.mass) +
                      potential_matrix(points, params, v);
  return 0.5 * (h + h.transpose());
}

QuantumModel build_model(const PointSet& points, const ModelParams& params, const PotentialFn& v) {
  params.validate();
  if (points.size() < 1 || points.dim() < 1) throw ArgumentError("model needs at least one point");
  if (!points.coords.allFinite()) throw ArgumentError("point coordinates must be finite");

  QuantumModel m;
  m.points = points;
  m.params = params;
  m.gram = gram_matrix(points.coords, params.sigma);
  m.kinetic = kinetic_from_gram(points.coords, m.gram, params.sigma, params.mass);
  m.potential = potential_matrix(points.coords, params, v);
  m.hamiltonian = m.kinetic + m.potential;
  m.position = position_matrices(points.coords, params.sigma);
  m.basis = orthonormal_basis(m.gram, params.basis_cutoff);
  return m;
}

QuantumModel build_model(const PointSet& points, const ModelParams& params,
                         const Eigen::MatrixXd& potential_points) {
  if (potential_points.cols() != static_cast<Eigen::Index>(points.dim())) {
    throw ArgumentError("potential points have a different dimension");
  }
  return build_model(points, params, parzen_potential(potential_points, params.sigma));
}

QuantumModel build_model(const PointSet& points, const ModelParams& params) {
  return build_model(points, params, points.coords);
}

}  // namespace dqc
