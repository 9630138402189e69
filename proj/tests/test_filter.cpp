#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dqc/errors.hpp"
#include "dqc/filter.hpp"
#include "oracles/brute_force.hpp"
#include "support.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

dqc::DataMatrix with_names(MatrixXd v) {
  dqc::DataMatrix m;
  m.values = std::move(v);
  for (Eigen::Index j = 0; j < m.values.cols(); ++j) m.feature_names.push_back("f" + std::to_string(j));
  return m;
}

// Four balanced signal columns on 8 rows plus one high-variance random column
// orthogonal to all of them.
MatrixXd signal_plus_noise(std::uint64_t seed) {
  VectorXd a(8), b(8);
  a << 1, 1, 1, 1, -1, -1, -1, -1;
  b << 1, 1, -1, -1, 1, 1, -1, -1;
  MatrixXd m(8, 5);
  m.col(0) = a + b;
  m.col(1) = a - b;
  m.col(2) = a + 0.9 * b;
  m.col(3) = a - 0.9 * b;
  testing::Rng rng(seed);
  VectorXd noise = rng.matrix(8, 1).col(0);
  const MatrixXd q = m.leftCols(4).householderQr().householderQ() * MatrixXd::Identity(8, 2);
  noise -= q * (q.transpose() * noise);
  m.col(4) = noise.normalized() * 6.0 * std::sqrt(8.0);
  return m;
}

}  // namespace

TEST_CASE("entropy of simple matrices") {
  VectorXd u(3), v(4);
  u << 1, 2, 3;
  v << 1, -1, 0.5, 2;
  CHECK(dqc::svd_entropy(MatrixXd(u * v.transpose())) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(dqc::svd_entropy(MatrixXd::Identity(4, 4)) == doctest::Approx(1.0));

  MatrixXd d = MatrixXd::Zero(2, 2);
  d(0, 0) = 2;
  d(1, 1) = 1;
  const double expected = -(0.8 * std::log(0.8) + 0.2 * std::log(0.2)) / std::log(2.0);
  CHECK(expected == doctest::Approx(0.7219).epsilon(1e-4));
  CHECK(dqc::svd_entropy(d) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(dqc::svd_entropy(d) == doctest::Approx(oracle::entropy(d)).epsilon(1e-12));

  CHECK(dqc::svd_entropy(MatrixXd::Ones(1, 5)) == 0.0);
  CHECK_THROWS_AS(dqc::svd_entropy(MatrixXd::Zero(3, 3)), dqc::UndefinedEntropyError);
}

TEST_CASE("entropy matches the oracle and is permutation and scale invariant") {
  testing::Rng rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = rng.integer(2, 9), d = rng.integer(2, 9);
    const MatrixXd m = rng.matrix(n, d);
    const double e = dqc::svd_entropy(m);
    CHECK(e >= 0.0);
    CHECK(e <= 1.0 + 1e-12);
    CHECK(e == doctest::Approx(oracle::entropy(m)).epsilon(1e-10));

    std::vector<int> rp(static_cast<std::size_t>(n)), cp(static_cast<std::size_t>(d));
    std::iota(rp.begin(), rp.end(), 0);
    std::iota(cp.begin(), cp.end(), 0);
    std::reverse(rp.begin(), rp.end());
    std::rotate(cp.begin(), cp.begin() + 1, cp.end());
    MatrixXd p(n, d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) p(i, j) = m(rp[static_cast<std::size_t>(i)], cp[static_cast<std::size_t>(j)]);
    }
    CHECK(dqc::svd_entropy(p) == doctest::Approx(e).epsilon(1e-10));
    CHECK(dqc::svd_entropy(MatrixXd(37.5 * m)) == doctest::Approx(e).epsilon(1e-10));
  }
}

TEST_CASE("leave-one-out contributions") {
  MatrixXd identical(5, 3);
  identical << 1, 1, 1, 2, 2, 2, -1, -1, -1, 0.5, 0.5, 0.5, 3, 3, 3;
  const auto s = dqc::feature_contributions(identical);
  CHECK(s.contributions.size() == 3);
  CHECK(s.contributions(0) == doctest::Approx(s.contributions(1)));
  CHECK(s.contributions(1) == doctest::Approx(s.contributions(2)));

  MatrixXd z(4, 3);
  z << 1, 0, 2, -1, 0, 0.5, 3, 0, 1, 0.2, 0, -2;
  const auto sz = dqc::feature_contributions(z);
  const VectorXd ref = oracle::leave_one_out(z);
  for (Eigen::Index i = 0; i < 3; ++i) CHECK(sz.contributions(i) == doctest::Approx(ref(i)).epsilon(1e-10));
  CHECK(sz.entropy_full == doctest::Approx(oracle::entropy(z)).epsilon(1e-12));

  CHECK(dqc::feature_contributions(MatrixXd(testing::Rng(2).matrix(6, 2))).contributions.size() == 2);
  CHECK_THROWS_AS(dqc::feature_contributions(MatrixXd::Ones(4, 1)), dqc::ArgumentError);
}

TEST_CASE("contributions agree with brute force on random shapes") {
  testing::Rng rng(8);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = rng.integer(1, 9), d = rng.integer(2, 9);
    const MatrixXd m = rng.matrix(n, d);
    const VectorXd got = dqc::feature_contributions(m).contributions;
    const VectorXd ref = oracle::leave_one_out(m);
    CHECK((got - ref).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("high-variance orthogonal noise is filtered out in one stage") {
  const MatrixXd m = signal_plus_noise(99);
  const VectorXd ref = oracle::leave_one_out(m);
  const double mean = ref.mean();
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(ref(i) > mean);
  CHECK(ref(4) < mean);

  const auto r = dqc::filter_features(with_names(m), 1);
  CHECK(r.kept == std::vector<std::size_t>{0, 1, 2, 3});
  REQUIRE(r.stages.size() == 1);
  CHECK(r.stages[0].removed == std::vector<std::size_t>{4});
  CHECK(r.stages[0].removed_names == std::vector<std::string>{"f4"});
  CHECK(r.filtered.cols() == 4);
  CHECK(r.filtered.feature_names == std::vector<std::string>{"f0", "f1", "f2", "f3"});
}

TEST_CASE("filter argument and early-stop behaviour") {
  CHECK_THROWS_AS(dqc::filter_features(with_names(MatrixXd::Ones(4, 3)), 0), dqc::ArgumentError);

  MatrixXd identical(4, 3);
  identical << 1, 1, 1, 2, 2, 2, 0, 0, 0, -1, -1, -1;
  const auto r = dqc::filter_features(with_names(identical), 3);
  CHECK(r.stopped_early);
  CHECK(r.stages.empty());
  CHECK(r.kept.size() == 3);
  CHECK_FALSE(r.stop_reason.empty());

  const auto two = dqc::filter_features(with_names(testing::Rng(4).matrix(5, 2)), 2);
  CHECK(two.kept.size() == 2);
  CHECK(two.stopped_early);
}

TEST_CASE("stage reports reconstruct the removal sequence") {
  testing::Rng rng(77);
  for (int trial = 0; trial < 15; ++trial) {
    const int d = rng.integer(4, 12);
    const auto m = with_names(rng.matrix(rng.integer(4, 15), d));
    dqc::RetentionRule rule{rng.uniform(-1.0, 0.5)};
    const auto r = dqc::filter_features(m, 3, rule);

    std::vector<std::size_t> alive(static_cast<std::size_t>(d));
    std::iota(alive.begin(), alive.end(), 0);
    for (const auto& st : r.stages) {
      CHECK_FALSE(st.removed.empty());
      for (auto f : st.removed) {
        auto it = std::find(alive.begin(), alive.end(), f);
        REQUIRE(it != alive.end());
        alive.erase(it);
      }
      CHECK(st.survivors == alive);
      CHECK(st.survivors.size() >= 2);
    }
    CHECK(r.kept == alive);
    CHECK(r.filtered.cols() == alive.size());
    for (std::size_t k = 0; k < alive.size(); ++k) {
      CHECK((r.filtered.values.col(static_cast<Eigen::Index>(k)) -
             m.values.col(static_cast<Eigen::Index>(alive[k])))
                .norm() == 0.0);
    }
  }
}
