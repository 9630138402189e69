#include <doctest.h>

#include <cmath>

#include "dqc/errors.hpp"
#include "dqc/model.hpp"
#include "oracles/brute_force.hpp"
#include "oracles/quadrature.hpp"
#include "support.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd vec1(double x) {
  VectorXd v(1);
  v << x;
  return v;
}

MatrixXd col(std::initializer_list<double> xs) {
  MatrixXd m(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return m;
}

dqc::ModelParams params(double sigma, double mass = 1.0) {
  dqc::ModelParams p;
  p.sigma = sigma;
  p.mass = mass;
  return p;
}

}  // namespace

TEST_CASE("parzen estimator values") {
  CHECK(dqc::parzen(vec1(0.3), col({0.3}), 0.2) == doctest::Approx(1.0));
  CHECK(dqc::parzen(vec1(0.0), col({-1.0, 1.0}), 1.0) ==
        doctest::Approx(2.0 * std::exp(-0.5)).epsilon(1e-12));
  CHECK(2.0 * std::exp(-0.5) == doctest::Approx(1.21306).epsilon(1e-5));
  CHECK(dqc::parzen(vec1(5.0), col({0.0, 1.0, 2.0}), 0.2) < 1e-10);
  CHECK(dqc::parzen(vec1(0.0), col({0.0}), 0.2) > 0.0);
}

TEST_CASE("single-point potential is a quadratic bowl") {
  const double sigma = 0.3, x1 = 0.7;
  CHECK(dqc::potential(vec1(x1), col({x1}), sigma) == doctest::Approx(-0.5));
  for (double x = -2.0; x <= 3.0; x += 0.25) {
    const double expected = (x - x1) * (x - x1) / (2 * sigma * sigma) - 0.5;
    CHECK(dqc::potential(vec1(x), col({x1}), sigma) == doctest::Approx(expected).epsilon(1e-12));
  }
  MatrixXd p2(1, 2);
  p2 << 0.1, -0.4;
  VectorXd at(2);
  at << 0.1, -0.4;
  CHECK(dqc::potential(at, p2, sigma) == doctest::Approx(-1.0));
}

TEST_CASE("potential far from every point stays finite and is flagged") {
  const MatrixXd pts = col({0.0, 0.1});
  const auto probe = dqc::potential_probe(vec1(100.0), pts, 0.05);
  CHECK(probe.asymptotic);
  CHECK(std::isfinite(probe.value));
  const double nearest = (100.0 - 0.1) * (100.0 - 0.1) / (2 * 0.05 * 0.05) - 0.5;
  CHECK(probe.value == doctest::Approx(nearest).epsilon(1e-10));
  CHECK_FALSE(dqc::potential_probe(vec1(0.05), pts, 0.05).asymptotic);
}

TEST_CASE("potential is unchanged when every point is duplicated") {
  testing::Rng rng(31);
  const MatrixXd pts = rng.matrix(7, 2);
  MatrixXd twice(14, 2);
  twice << pts, pts;
  for (int k = 0; k < 30; ++k) {
    const VectorXd x = rng.matrix(2, 1, -1.5, 1.5).col(0);
    CHECK(dqc::potential(x, twice, 0.25) == doctest::Approx(dqc::potential(x, pts, 0.25)).epsilon(1e-12));
  }
}

TEST_CASE("parzen function solves the zero-energy equation") {
  testing::Rng rng(7);
  const double sigma = 0.3;
  const MatrixXd pts = rng.matrix(10, 2);
  auto psi = [&](const VectorXd& x) { return dqc::parzen(x, pts, sigma); };
  double psi_max = 0.0;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) psi_max = std::max(psi_max, psi(pts.row(i).transpose()));
  for (int k = 0; k < 50; ++k) {
    const VectorXd x = rng.matrix(2, 1, -1.3, 1.3).col(0);
    const double lap = oracle::laplacian(psi, x, 1e-2 * sigma);
    const double residual = -0.5 * sigma * sigma * lap + dqc::potential(x, pts, sigma) * psi(x);
    CHECK(std::abs(residual) < 1e-4 * psi_max);
  }
}

TEST_CASE("Gram matrix values") {
  const double sigma = 0.2;
  const MatrixXd g = dqc::gram_matrix(col({0.0, 2 * sigma, 20 * sigma}), sigma);
  CHECK(g(0, 0) == 1.0);
  CHECK(g(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(g(0, 1) == doctest::Approx(0.36788).epsilon(1e-5));
  CHECK(g(0, 2) == 0.0);
  CHECK(g(1, 2) > 0.0);
  CHECK((g - g.transpose()).norm() == 0.0);

  MatrixXd p2(2, 2);
  p2 << 0, 0, 1.2 * sigma, 1.6 * sigma;
  CHECK(dqc::gram_matrix(p2, sigma)(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("overlap, kinetic and position elements match quadrature") {
  testing::Rng rng(1234);
  for (int dim : {1, 2}) {
    for (double sigma : {0.1, 0.5}) {
      const int n = rng.integer(2, 4);
      const MatrixXd pts = rng.matrix(n, dim, -2.5 * sigma, 2.5 * sigma);
      const double mass = rng.uniform(0.2, 3.0);
      const MatrixXd g = dqc::gram_matrix(pts, sigma);
      const MatrixXd k = dqc::kinetic_matrix(pts, sigma, mass);
      const auto x = dqc::position_matrices(pts, sigma);
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          oracle::Point a(static_cast<std::size_t>(dim)), b(static_cast<std::size_t>(dim));
          for (int c = 0; c < dim; ++c) {
            a[static_cast<std::size_t>(c)] = pts(i, c);
            b[static_cast<std::size_t>(c)] = pts(j, c);
          }
          const oracle::GaussianPair pair(a, b, sigma);
          CHECK(std::abs(g(i, j) - pair.overlap()) < 1e-6);
          CHECK(std::abs(k(i, j) - pair.kinetic(mass)) < 1e-6);
          for (int c = 0; c < dim; ++c) {
            CHECK(std::abs(x[static_cast<std::size_t>(c)](i, j) - pair.position(static_cast<std::size_t>(c))) < 1e-6);
          }
        }
      }
    }
  }
}

TEST_CASE("kinetic diagonal and coincident points") {
  testing::Rng rng(3);
  for (int dim : {1, 2, 3}) {
    const MatrixXd pts = rng.matrix(4, dim);
    const double sigma = 0.4, mass = 2.5;
    const MatrixXd k = dqc::kinetic_matrix(pts, sigma, mass);
    for (int i = 0; i < 4; ++i) CHECK(k(i, i) == doctest::Approx(dim / (4 * mass * sigma * sigma)));
  }
  MatrixXd pts(3, 2);
  pts << 0.1, 0.2, 0.1, 0.2, -0.3, 0.5;
  const auto m = dqc::build_model(dqc::PointSet::from_coords(pts), params(0.3));
  CHECK((m.kinetic.row(0) - m.kinetic.row(1)).norm() == 0.0);
  CHECK((m.potential.row(0) - m.potential.row(1)).norm() == 0.0);
  CHECK((m.hamiltonian - m.hamiltonian.transpose()).norm() == 0.0);
}

TEST_CASE("single-point potential element") {
  const double sigma = 0.3, x1 = 0.2;
  const auto v = dqc::parzen_potential(col({x1}), sigma);
  const oracle::GaussianPair self({x1}, {x1}, sigma);
  const double exact = self.potential([&](const oracle::Point& x) { return v(vec1(x[0])); });
  CHECK(exact == doctest::Approx(-0.25).epsilon(1e-9));

  dqc::ModelParams mid = params(sigma);
  CHECK(dqc::potential_matrix(col({x1}), mid, v)(0, 0) == doctest::Approx(-0.5));

  dqc::ModelParams sampled = params(sigma);
  sampled.potential_rule = dqc::PotentialRule::kSampled;
  sampled.potential_samples = 4096;
  CHECK(std::abs(dqc::potential_matrix(col({x1}), sampled, v)(0, 0) - exact) < 0.02);

  const auto m = dqc::build_model(dqc::PointSet::from_coords(col({x1})), sampled);
  CHECK(m.hamiltonian(0, 0) ==
        doctest::Approx(1.0 / (4 * sigma * sigma) + m.potential(0, 0)).epsilon(1e-14));
}

TEST_CASE("sampled rule approaches the quadrature value on random pairs") {
  testing::Rng rng(19);
  const double sigma = 0.3;
  const MatrixXd pts = rng.matrix(4, 2, -0.5, 0.5);
  const auto v = dqc::parzen_potential(pts, sigma);
  dqc::ModelParams sampled = params(sigma);
  sampled.potential_rule = dqc::PotentialRule::kSampled;
  sampled.potential_samples = 20000;
  const MatrixXd p = dqc::potential_matrix(pts, sampled, v);
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) {
      const oracle::GaussianPair pair({pts(i, 0), pts(i, 1)}, {pts(j, 0), pts(j, 1)}, sigma);
      VectorXd probe(2);
      const double q = pair.potential([&](const oracle::Point& x) {
        probe << x[0], x[1];
        return v(probe);
      });
      CHECK(std::abs(p(i, j) - q) < 0.03);
    }
  }
}

TEST_CASE("position matrix values") {
  const double sigma = 0.25, a = 0.3;
  MatrixXd pts(2, 2);
  pts << 0, 0, a, 0;
  const auto x = dqc::position_matrices(pts, sigma);
  REQUIRE(x.size() == 2);
  const double n01 = std::exp(-a * a / (4 * sigma * sigma));
  CHECK(x[0](0, 1) == doctest::Approx(n01 * a / 2));
  CHECK(x[1](0, 1) == 0.0);
  CHECK(x[0](1, 1) == doctest::Approx(a));
  CHECK(x[0](0, 0) == 0.0);
  CHECK((x[0] - x[0].transpose()).norm() == 0.0);

  MatrixXd far(2, 1);
  far << 0, 50 * sigma;
  CHECK(dqc::position_matrices(far, sigma)[0](0, 1) == 0.0);
}

TEST_CASE("orthonormal basis examples") {
  const auto id = dqc::orthonormal_basis(MatrixXd::Identity(3, 3), 1e-6);
  CHECK(id.size() == 3);
  // Degenerate eigenvalues leave the column order free; each column is still a unit axis.
  CHECK((id.T.transpose() * id.T - MatrixXd::Identity(3, 3)).norm() < 1e-12);
  for (int a = 0; a < 3; ++a) CHECK(id.T.col(a).maxCoeff() == doctest::Approx(1.0));

  const auto dup = dqc::orthonormal_basis(MatrixXd::Ones(2, 2), 1e-6);
  REQUIRE(dup.size() == 1);
  CHECK(dup.eigenvalues(0) == doctest::Approx(2.0));
  CHECK(dup.T(0, 0) == doctest::Approx(0.5));
  CHECK(dup.T(1, 0) == doctest::Approx(0.5));

  MatrixXd d = MatrixXd::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 0.4;
  CHECK(dqc::orthonormal_basis(d, 0.5).size() == 1);
  CHECK(dqc::orthonormal_basis(d, 0.3).size() == 2);

  CHECK_THROWS_AS(dqc::orthonormal_basis(MatrixXd::Zero(2, 2), 1e-6), dqc::DegenerateBasisError);
  CHECK_THROWS_AS(dqc::orthonormal_basis(d, 0.0), dqc::ArgumentError);
  CHECK_THROWS_AS(dqc::orthonormal_basis(MatrixXd::Zero(2, 3), 0.1), dqc::ArgumentError);
}

TEST_CASE("transformed Gram matrix is the identity") {
  testing::Rng rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.integer(1, 40), dim = rng.integer(1, 3);
    const double sigma = rng.uniform(0.05, 0.6);
    const MatrixXd g = dqc::gram_matrix(rng.matrix(n, dim), sigma);
    const auto b = dqc::orthonormal_basis(g, 1e-6);
    const auto q = static_cast<Eigen::Index>(b.size());
    CHECK(q <= n);
    CHECK((b.T.transpose() * g * b.T - MatrixXd::Identity(q, q)).cwiseAbs().maxCoeff() < 1e-8);
    for (Eigen::Index a = 0; a + 1 < q; ++a) CHECK(b.eigenvalues(a) >= b.eigenvalues(a + 1));
  }
}

TEST_CASE("translation covariance") {
  testing::Rng rng(5);
  const MatrixXd pts = rng.matrix(6, 2);
  VectorXd c(2);
  c << 3.5, -1.25;
  const MatrixXd shifted = pts.rowwise() + c.transpose();
  const double sigma = 0.35;
  CHECK((dqc::gram_matrix(pts, sigma) - dqc::gram_matrix(shifted, sigma)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((dqc::kinetic_matrix(pts, sigma, 1.3) - dqc::kinetic_matrix(shifted, sigma, 1.3)).cwiseAbs().maxCoeff() <
        1e-10);
  const auto x0 = dqc::position_matrices(pts, sigma);
  const auto x1 = dqc::position_matrices(shifted, sigma);
  for (int k = 0; k < 2; ++k) {
    for (int i = 0; i < 6; ++i) CHECK(x1[static_cast<std::size_t>(k)](i, i) == doctest::Approx(x0[static_cast<std::size_t>(k)](i, i) + c(k)));
  }
  const auto m0 = dqc::build_model(dqc::PointSet::from_coords(pts), params(sigma));
  const auto m1 = dqc::build_model(dqc::PointSet::from_coords(shifted), params(sigma));
  CHECK((m0.hamiltonian - m1.hamiltonian).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("model assembly and validation") {
  testing::Rng rng(12);
  const MatrixXd pts = rng.matrix(5, 2);
  const auto m = dqc::build_model(dqc::PointSet::from_coords(pts), params(0.3, 2.0));
  CHECK(m.size() == 5);
  CHECK(m.dim() == 2);
  CHECK(m.position.size() == 2);
  CHECK((m.hamiltonian - (m.kinetic + m.potential)).cwiseAbs().maxCoeff() < 1e-12);
  const auto v = dqc::parzen_potential(pts, 0.3);
  CHECK((dqc::hamiltonian_matrix(pts, m.gram, params(0.3, 2.0), v) - m.hamiltonian).norm() < 1e-12);
  CHECK_THROWS_AS(dqc::hamiltonian_matrix(pts, MatrixXd::Identity(4, 4), params(0.3), v), dqc::ArgumentError);

  // Far-apart pairs have clamped overlap and no potential coupling.
  const MatrixXd far = col({0.0, 100.0});
  const auto mf = dqc::build_model(dqc::PointSet::from_coords(far), params(0.1));
  CHECK(mf.gram(0, 1) == 0.0);
  CHECK(mf.potential(0, 1) == 0.0);

  // A separate potential source leaves kinetic and Gram parts unchanged.
  const auto ms = dqc::build_model(dqc::PointSet::from_coords(pts.topRows(3)), params(0.3, 2.0), pts);
  CHECK((ms.kinetic - m.kinetic.topLeftCorner(3, 3)).norm() < 1e-14);
  CHECK((ms.potential - m.potential.topLeftCorner(3, 3)).norm() < 1e-14);

  dqc::ModelParams bad = params(0.0);
  CHECK_THROWS_AS(bad.validate(), dqc::ArgumentError);
  bad = params(0.1, -1.0);
  CHECK_THROWS_AS(bad.validate(), dqc::ArgumentError);
  bad = params(0.1);
  bad.basis_cutoff = 1.0;
  CHECK_THROWS_AS(bad.validate(), dqc::ArgumentError);
  bad = params(0.1);
  bad.potential_rule = dqc::PotentialRule::kSampled;
  bad.potential_samples = 0;
  CHECK_THROWS_AS(bad.validate(), dqc::ArgumentError);
}
