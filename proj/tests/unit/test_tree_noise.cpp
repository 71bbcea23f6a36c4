#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "combat/tree_noise.hpp"

using namespace combat;

namespace {

// |S(t)| and cut sizes straight from the definitions, quadratic time.
TreeShape brute_shape(std::int64_t T) {
  TreeShape s;
  for (std::int64_t t = 1; t <= T; ++t) {
    int depth = 0;
    for (std::int64_t u = t; u > 0; u = u - (u & -u)) ++depth;
    s.depth = std::max(s.depth, depth);
    int width = 0;
    for (std::int64_t r = 1; r <= T; ++r) {
      if (r - (r & -r) < t && t <= r) ++width;
    }
    s.width = std::max(s.width, width);
  }
  return s;
}

}  // namespace

TEST_CASE("parent examples") {
  CHECK(parent(3) == 2);
  CHECK(parent(4) == 0);
  CHECK(parent(1) == 0);
  CHECK(parent(12) == 8);
  CHECK_THROWS(parent(0));
}

TEST_CASE("ancestors examples") {
  CHECK(ancestors(0).empty());
  CHECK(ancestors(7) == std::vector<std::int64_t>{6, 4, 0});
  for (int k = 0; k < 20; ++k) CHECK(ancestors(std::int64_t{1} << k) == std::vector<std::int64_t>{0});
}

TEST_CASE("depth and width examples") {
  const auto one = depth_and_width(1);
  CHECK(one.depth == 1);
  CHECK(one.width == 1);
  const auto eight = depth_and_width(8);
  CHECK(eight.depth <= 4);
  CHECK(eight.width <= 4);
  const auto big = depth_and_width(1024);
  CHECK(big.depth <= 11);
  CHECK(big.width <= 11);
}

TEST_CASE("depth and width agree with the definitions") {
  for (std::int64_t T = 1; T <= 200; ++T) {
    const auto fast = depth_and_width(T);
    const auto slow = brute_shape(T);
    CHECK(fast.depth == slow.depth);
    CHECK(fast.width == slow.width);
  }
}

TEST_CASE("incremental profile matches single evaluations") {
  const auto prof = depth_and_width_profile(3000);
  REQUIRE(prof.size() == 3000);
  for (std::int64_t T : {1, 2, 3, 17, 255, 256, 257, 1000, 2047, 3000}) {
    CHECK(prof[static_cast<std::size_t>(T - 1)].depth == depth_and_width(T).depth);
    CHECK(prof[static_cast<std::size_t>(T - 1)].width == depth_and_width(T).width);
  }
}

TEST_CASE("walk examples") {
  GaussianWalk w(42, 0.3, 64);
  CHECK(w.value(0) == 0.0);
  CHECK(w.value(7) == w.increment(4) + w.increment(6) + w.increment(7));
  GaussianWalk flat(42, 0.0, 64);
  for (int t = 0; t <= 64; ++t) CHECK(flat.value(t) == 0.0);
}

TEST_CASE("walk equals the non-recursive ancestor sum") {
  GaussianWalk w(9, 0.7, 4096, 3);
  for (std::int64_t t = 1; t <= 4096; ++t) {
    for (int s = 0; s < 3; ++s) {
      double sum = w.increment(t, s);
      for (auto a : ancestors(t)) {
        if (a > 0) sum += w.increment(a, s);
      }
      CHECK(w.value(t, s) == doctest::Approx(sum).epsilon(1e-12));
    }
  }
}

TEST_CASE("walk values do not depend on query order") {
  GaussianWalk fwd(5, 1.0, 2000, 2);
  std::vector<double> ref;
  for (std::int64_t t = 0; t <= 2000; ++t) ref.push_back(fwd.value(t, 1));
  std::vector<std::int64_t> order(2001);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), std::mt19937_64(1));
  GaussianWalk shuffled(5, 1.0, 2000, 2);
  for (auto t : order) CHECK(shuffled.value(t, 1) == ref[static_cast<std::size_t>(t)]);
}

TEST_CASE("per-arm walks are uncorrelated across arms") {
  const int seeds = 10000;
  const std::int64_t t = 13;
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (int s = 0; s < seeds; ++s) {
    GaussianWalk w(static_cast<std::uint64_t>(s), 1.0, 16, 2);
    const double x = w.value(t, 0), y = w.value(t, 1);
    sx += x; sy += y; sxy += x * y; sxx += x * x; syy += y * y;
  }
  const double n = seeds;
  const double cov = sxy / n - sx / n * sy / n;
  const double r = cov / std::sqrt((sxx / n - sx * sx / n / n) * (syy / n - sy * sy / n / n));
  CHECK(std::abs(r) < 3.0 / std::sqrt(n));
}

TEST_CASE("gaussian increments have unit variance before scaling") {
  double s = 0, ss = 0;
  const int n = 100000;
  GaussianWalk w(3, 1.0, n);
  for (int t = 1; t <= n; ++t) {
    const double x = w.increment(t);
    s += x;
    ss += x * x;
  }
  CHECK(std::abs(s / n) < 4.0 / std::sqrt(n));
  CHECK(ss / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
}
