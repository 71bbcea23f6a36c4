#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "combat/bandit_policies.hpp"

using namespace combat;

namespace {

// Plain Gauss-Jordan inverse with partial pivoting.
std::vector<std::vector<double>> invert(std::vector<std::vector<double>> m) {
  const std::size_t n = m.size();
  std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    }
    std::swap(m[c], m[piv]);
    std::swap(inv[c], inv[piv]);
    const double d = m[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      m[c][k] /= d;
      inv[c][k] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = m[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        m[r][k] -= f * m[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

std::vector<double> random_distribution(std::size_t n, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(n);
  for (auto& x : p) x = e(rng) + 1e-3;
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& x : p) x /= s;
  return p;
}

}  // namespace

TEST_CASE("arm enumeration is lexicographic and ranked") {
  ArmSet arms(5, 2);
  CHECK(arms.size() == 10);
  CHECK(arms.arm(0).indices() == std::vector<int>{0, 1});
  CHECK(arms.arm(1).indices() == std::vector<int>{0, 2});
  CHECK(arms.arm(9).indices() == std::vector<int>{3, 4});
  ArmSet big(12, 5);
  for (std::size_t j = 0; j < big.size(); ++j) CHECK(big.rank(big.arm(j)) == j);
  CHECK_THROWS_AS(ArmSet(60, 30), InvalidArgument);
}

TEST_CASE("exploration distribution") {
  CHECK(build_exploration_distribution(3, 1) == std::vector<double>(3, 1.0 / 3));
  CHECK(build_exploration_distribution(4, 2) == std::vector<double>(6, 1.0 / 6));
  const auto mu = build_exploration_distribution(7, 3);
  ArmSet arms(7, 3);
  std::vector<double> marg(7, 0.0);
  for (std::size_t j = 0; j < arms.size(); ++j) {
    for (auto i : arms.indices(j)) marg[i] += mu[j];
  }
  for (double m : marg) CHECK(m == doctest::Approx(3.0 / 7).epsilon(1e-12));
  CHECK_THROWS_AS(build_exploration_distribution(60, 30), InvalidArgument);
}

TEST_CASE("covariance examples") {
  const auto two = exp2_covariance(std::vector<double>{0.5, 0.5}, ArmSet(2, 1));
  CHECK(two.matrix(0, 0) == 0.5);
  CHECK(two.matrix(0, 1) == 0.0);
  CHECK(two.pinv(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(two.pinv(0, 1)) < 1e-12);

  const auto full = exp2_covariance(std::vector<double>{1.0}, ArmSet(4, 4));
  CHECK(full.rank == 1);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      CHECK(full.matrix(a, b) == 1.0);
      CHECK(full.pinv(a, b) == doctest::Approx(1.0 / 16).epsilon(1e-12));
    }
  }
}

TEST_CASE("covariance is PSD with a valid pseudo-inverse and marginal diagonal") {
  std::mt19937_64 rng(2);
  ArmSet arms(7, 3);
  for (int trial = 0; trial < 50; ++trial) {
    auto p = random_distribution(arms.size(), rng);
    if (trial % 5 == 0) {
      for (std::size_t j = 0; j < p.size(); j += 2) p[j] = 0.0;
      const double s = std::accumulate(p.begin(), p.end(), 0.0);
      for (auto& x : p) x /= s;
    }
    const auto cov = exp2_covariance(p, arms);
    CHECK(cov.min_eigenvalue >= -1e-10);
    CHECK((cov.matrix - cov.matrix.transpose()).norm() == 0.0);
    CHECK((cov.matrix * cov.pinv * cov.matrix - cov.matrix).norm() < 1e-8);
    for (int i = 0; i < 7; ++i) {
      double marg = 0.0;
      for (std::size_t j = 0; j < arms.size(); ++j) marg += arms.arm(j).contains(i) ? p[j] : 0.0;
      CHECK(cov.matrix(i, i) == doctest::Approx(marg).epsilon(1e-12));
    }
  }
}

TEST_CASE("uniform exploration gives a full-rank covariance") {
  for (int K = 2; K <= 9; ++K) {
    for (int I = 1; I < K; ++I) {
      ArmSet arms(K, I);
      const auto cov = exp2_covariance(build_exploration_distribution(K, I), arms);
      CHECK(cov.rank == K);
      CHECK(cov.min_eigenvalue > 0.0);
    }
  }
}

TEST_CASE("estimator is exactly unbiased on the enumeration") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int K : {4, 6, 8}) {
    ArmSet arms(K, 2);
    for (int trial = 0; trial < 20; ++trial) {
      const auto p = random_distribution(arms.size(), rng);
      std::vector<std::vector<double>> sigma(K, std::vector<double>(K, 0.0));
      for (std::size_t j = 0; j < arms.size(); ++j) {
        for (auto a : arms.indices(j)) {
          for (auto b : arms.indices(j)) sigma[a][b] += p[j];
        }
      }
      const auto sinv = invert(sigma);
      std::vector<double> l(K);
      for (auto& x : l) x = u(rng);
      const auto cov = exp2_covariance(p, arms);
      std::vector<double> mean(K, 0.0), oracle(K, 0.0);
      for (std::size_t j = 0; j < arms.size(); ++j) {
        double X = 0.0;
        for (auto a : arms.indices(j)) X += l[a];
        for (int i = 0; i < K; ++i) {
          double sa = 0.0, oa = 0.0;
          for (auto a : arms.indices(j)) {
            sa += cov.pinv(i, a);
            oa += sinv[i][a];
          }
          mean[i] += p[j] * X * sa;
          oracle[i] += p[j] * X * oa;
        }
      }
      for (int i = 0; i < K; ++i) {
        CHECK(std::abs(mean[i] - l[i]) < 1e-9);
        CHECK(std::abs(oracle[i] - l[i]) < 1e-9);
      }
    }
  }
}

TEST_CASE("exp2 parameters") {
  const ProblemSpec s{10, 3, 1000, 1.0};
  const auto sched = batch_schedule_exp2(s);
  REQUIRE(sched.nominal_length() == 4);
  const auto p = exp2_parameters(s, sched);
  const double eta = std::sqrt(std::log(120.0) / (3.0 * 251 * 10 * 144));
  CHECK(eta == doctest::Approx(2.101e-3).epsilon(1e-3));
  CHECK(p.eta == doctest::Approx(eta).epsilon(1e-12));
  CHECK(p.gamma == doctest::Approx(eta * 120).epsilon(1e-12));
  CHECK(p.gamma == doctest::Approx(0.2521).epsilon(1e-3));

  // N -> 2N at fixed B scales eta by 1/sqrt(2): T = 800B - 1 and 1600B - 1
  const auto p8 = exp2_parameters({10, 3, 3199, 1.0}, make_schedule(3199, 4));
  const auto p16 = exp2_parameters({10, 3, 6399, 1.0}, make_schedule(6399, 4));
  CHECK(p16.eta == doctest::Approx(p8.eta / std::sqrt(2.0)).epsilon(1e-12));

  const auto deg = exp2_parameters({4, 4, 100, 1.0}, make_schedule(100, 3));
  CHECK(deg.eta == 0.0);
  CHECK(deg.gamma == 0.0);
  CHECK_THROWS_AS(exp2_parameters({10, 3, 2, 1.0}, make_schedule(2, 2)), InvalidArgument);
}

TEST_CASE("exp2 sampling") {
  ArmSet arms(4, 2);
  const auto mu = build_exploration_distribution(4, 2);
  Exp2State pure(arms, {1.0, 0.3}, mu);
  CHECK(pure.sampling_distribution() == mu);

  Exp2State s(arms, {0.2, 0.5}, mu);
  for (int j = 0; j < 5; ++j) s.update(std::size_t{2}, 4.0);
  const auto p = s.sampling_distribution();
  CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  for (double x : p) CHECK(x >= 0.2 / 6 - 1e-15);

  SplitMixRng rng(77);
  const int n = 100000;
  std::vector<int> hits(6, 0);
  for (int k = 0; k < n; ++k) ++hits[s.select(rng)];
  for (std::size_t j = 0; j < 6; ++j) {
    const double sd = std::sqrt(n * p[j] * (1 - p[j]));
    CHECK(std::abs(hits[j] - n * p[j]) < 4 * sd);
  }
}

TEST_CASE("exp2 update edge cases") {
  ArmSet arms(5, 2);
  const auto mu = build_exploration_distribution(5, 2);
  Exp2State s(arms, {0.1, 0.3}, mu);
  const auto q0 = s.q();
  s.update(std::size_t{3}, 0.0);
  CHECK(s.q() == q0);
  Exp2State frozen(arms, {0.1, 0.0}, mu);
  frozen.update(std::size_t{3}, 7.0);
  CHECK(frozen.q() == q0);
  Exp2State moving(arms, {0.1, 0.3}, mu);
  moving.update(std::size_t{3}, 2.0);
  CHECK(moving.q() != q0);
  CHECK(std::accumulate(moving.q().begin(), moving.q().end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(moving.update(std::size_t{3}, -1.0), InvalidArgument);
  CHECK_THROWS_AS(Exp2State(arms, {0.1, 0.3}, std::vector<double>(3, 1.0 / 3)), InvalidArgument);
}

TEST_CASE("exp2 is equivariant under relabeling") {
  const int K = 5, I = 2;
  ArmSet arms(K, I);
  const auto mu = build_exploration_distribution(K, I);
  const std::vector<int> perm = {3, 0, 4, 1, 2};
  auto relabel = [&](const CombinatorialArm& a) {
    std::vector<int> idx;
    for (int i : a.indices()) idx.push_back(perm[static_cast<std::size_t>(i)]);
    return CombinatorialArm::from_indices(K, idx);
  };
  Exp2State a(arms, {0.2, 0.4}, mu), b(arms, {0.2, 0.4}, mu);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int n = 0; n < 30; ++n) {
    const std::size_t j = rng() % arms.size();
    const double X = u(rng);
    a.update(arms.arm(j), X);
    b.update(relabel(arms.arm(j)), X);
  }
  for (std::size_t j = 0; j < arms.size(); ++j) {
    CHECK(a.q()[j] == doctest::Approx(b.q()[arms.rank(relabel(arms.arm(j)))]).epsilon(1e-10));
  }
}

TEST_CASE("exp3 baseline") {
  Exp3State s(10, {0.2, 0.1});
  const auto q0 = s.q();
  s.update(4, 0.0);
  CHECK(s.q() == q0);

  Exp3State two(2, {1.0, 0.5});
  for (int n = 0; n < 50; ++n) {
    two.update(static_cast<std::size_t>(n % 2), 3.0);
    two.update(static_cast<std::size_t>((n + 1) % 2), 3.0);
  }
  CHECK(two.q()[0] == doctest::Approx(0.5).epsilon(1e-12));

  // per meta-arm unbiasedness: sum_j p_j (X_j 1{j = i} / p_j) = X_i
  ArmSet arms(5, 2);
  Exp3State e(arms.size(), {0.3, 0.2});
  e.update(std::size_t{1}, 1.5);
  const auto p = e.sampling_distribution();
  std::vector<double> X(arms.size());
  std::mt19937_64 rng(8);
  for (auto& x : X) x = std::uniform_real_distribution<double>(0, 2)(rng);
  for (std::size_t i = 0; i < arms.size(); ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < arms.size(); ++j) mean += p[j] * (j == i ? X[j] / p[j] : 0.0);
    CHECK(mean == doctest::Approx(X[i]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(e.update(99, 1.0), InvalidArgument);
}

TEST_CASE("batched policies hold the interface contract") {
  const ProblemSpec s{6, 2, 500, 1.0};
  const auto params = exp2_parameters(s, batch_schedule_exp2(s));
  Exp2Policy e2(s, params);
  Exp3Policy e3(s, params);
  SplitMixRng rng(3);
  for (BatchedPolicy* p : std::initializer_list<BatchedPolicy*>{&e2, &e3}) {
    CHECK(p->required_feedback() == Feedback::Bandit);
    for (int n = 0; n < 20; ++n) {
      const auto a = p->select(rng);
      CHECK(a.size() == 2);
      FeedbackView fb;
      fb.bandit_value = 1.0;
      p->observe(fb);
    }
    CHECK(!p->metadata().empty());
  }
  CHECK(e2.id() == "batched-exp2");
  CHECK(e3.id() == "batched-exp3");
}
