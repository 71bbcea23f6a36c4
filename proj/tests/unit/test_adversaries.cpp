#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "combat/adversaries.hpp"

using namespace combat;

namespace {

AdversaryConfig config(AdversaryKind kind, ProblemSpec spec, std::uint64_t seed = 1, double scale = 1.0) {
  AdversaryConfig c;
  c.kind = kind;
  c.spec = spec;
  c.seed = seed;
  c.scale = scale;
  return c;
}

}  // namespace

TEST_CASE("noise parameters against direct evaluation") {
  const ProblemSpec s{10, 3, 10000, 1.0};
  const double log2T = std::log2(10000.0);
  // 10 * 10^{1/3} * 30000^{-1/3} / (9 log2 T)
  const double eps_cin = 10.0 * std::pow(10.0, 1.0 / 3) * std::pow(30000.0, -1.0 / 3) / (9.0 * log2T);
  CHECK(eps_cin == doctest::Approx(0.0057983).epsilon(1e-4));
  CHECK(cin_parameters(s, 10.0).epsilon == doctest::Approx(eps_cin).epsilon(1e-12));
  CHECK(cin_parameters(s, 10.0, NoiseCalibration::Experiment).sigma ==
        doctest::Approx(10.0 / (9.0 * log2T)).epsilon(1e-12));

  const double e1 = eps_cin / 10.0;
  const double sigma_thm = 1.0 / (6.0 * std::sqrt(log2T * std::log2(4.0 * 10000.0 * (1.0 + e1) / e1)));
  CHECK(cin_parameters(s, 1.0).sigma == doctest::Approx(sigma_thm).epsilon(1e-12));

  const double eps_cdn = 10.0 * std::pow(10.0, 1.0 / 3) * std::pow(3.0, -2.0 / 3) *
                         std::pow(10000.0, -1.0 / 3) / (9.0 * log2T);
  CHECK(eps_cdn == doctest::Approx(0.00402).epsilon(1e-3));
  CHECK(cdn_parameters(s, 10.0).epsilon == doctest::Approx(eps_cdn).epsilon(1e-12));
  CHECK(cdn_parameters(s, 10.0).sigma == doctest::Approx(10.0 / (9.0 * log2T)).epsilon(1e-12));
}

TEST_CASE("noise adversaries reject bad configurations") {
  CHECK_THROWS_AS(cin_parameters(ProblemSpec{10, 3, 1, 1.0}, 1.0), InvalidArgument);
  CHECK_THROWS_AS(CinAdversary(config(AdversaryKind::CIN, {10, 3, 1000, 1.0}, 1, 0.0)), InvalidArgument);
  CHECK_THROWS_AS(CdnAdversary(config(AdversaryKind::CDN, {10, 3, 1000, 1.0}, 1, -1.0)), InvalidArgument);
  // epsilon >= 1/2 after scaling
  CHECK_THROWS_AS(CinAdversary(config(AdversaryKind::CIN, {10, 3, 1000, 1.0}, 1, 1000.0)), InvalidArgument);
}

TEST_CASE("CIN shares one walk and offsets chi by epsilon") {
  auto c = config(AdversaryKind::CIN, {10, 3, 4096, 1.0}, 17);
  CinAdversary adv(c);
  const double eps = adv.parameters().epsilon;
  for (std::int64_t t = 1; t <= 4096; t += 7) {
    const auto raw = adv.unclipped(t);
    const auto l = adv.loss(t);
    double base = -1;
    for (int x = 0; x < 10; ++x) {
      const double expect = raw[static_cast<std::size_t>(x)] + (adv.chi().contains(x) ? eps : 0.0);
      if (base < 0) base = expect;
      CHECK(expect == doctest::Approx(base).epsilon(1e-14));
      CHECK(l[x] == clip_unit(raw[static_cast<std::size_t>(x)]));
    }
    for (int x = 0; x < 10; ++x) {
      for (int y = 0; y < 10; ++y) {
        if (adv.chi().contains(x) == adv.chi().contains(y)) CHECK(l[x] == l[y]);
      }
    }
  }
}

TEST_CASE("CIN with zero walk gives 1/2 off chi") {
  const std::vector<int> chi = {0, 1, 2};
  auto c = config(AdversaryKind::CIN, {10, 3, 1000, 1.0});
  c.chi = CombinatorialArm::from_indices(10, chi);
  CinAdversary adv(c);
  // t = 1: W_1 = xi_1; remove it to isolate the constant part
  const auto raw = adv.unclipped(1);
  const double w = raw[5] - 0.5;
  CHECK(raw[5] - w == doctest::Approx(0.5));
  CHECK(raw[0] - w == doctest::Approx(0.5 - adv.parameters().epsilon));
}

TEST_CASE("CDN marginal mean and variance follow the walk") {
  const std::vector<int> chi = {0};
  const ProblemSpec s{4, 1, 64, 1.0};
  const std::int64_t t = 7;  // S(7) u {7} \ {0} = {4, 6, 7}
  const int seeds = 10000;
  double s0 = 0, s1 = 0, q1 = 0;
  double sigma = 0, eps = 0;
  for (int k = 0; k < seeds; ++k) {
    auto c = config(AdversaryKind::CDN, s, static_cast<std::uint64_t>(k));
    c.chi = CombinatorialArm::from_indices(4, chi);
    CdnAdversary adv(c);
    sigma = adv.parameters().sigma;
    eps = adv.parameters().epsilon;
    const auto raw = adv.unclipped(t);
    s0 += raw[0];
    s1 += raw[1];
    q1 += (raw[1] - 0.5) * (raw[1] - 0.5);
  }
  const double var = 3.0 * sigma * sigma;
  const double se = std::sqrt(var / seeds);
  CHECK(std::abs(s0 / seeds - (0.5 - eps)) < 4 * se);
  CHECK(std::abs(s1 / seeds - 0.5) < 4 * se);
  CHECK(q1 / seeds == doctest::Approx(var).epsilon(0.05));
}

TEST_CASE("generators are pure functions of (seed, config, t)") {
  for (auto kind : {AdversaryKind::CIN, AdversaryKind::CDN, AdversaryKind::SC}) {
    auto c = config(kind, {8, 2, 500, 1.0}, 99);
    auto a = make_adversary(c);
    auto b = make_adversary(c);
    std::vector<std::vector<double>> fwd;
    for (std::int64_t t = 1; t <= 500; ++t) fwd.push_back(a->loss(t).values());
    for (std::int64_t t = 500; t >= 1; --t) CHECK(b->loss(t).values() == fwd[static_cast<std::size_t>(t - 1)]);
    for (std::int64_t t = 1; t <= 500; ++t) CHECK(a->loss(t).values() == fwd[static_cast<std::size_t>(t - 1)]);
    CHECK_THROWS_AS(a->loss(0), InvalidArgument);
    CHECK_THROWS_AS(a->loss(501), InvalidArgument);
  }
}

TEST_CASE("hidden arm is a valid uniform draw") {
  std::vector<int> hits(6, 0);
  for (std::uint64_t s = 0; s < 6000; ++s) {
    const auto a = draw_hidden_arm(6, 2, s);
    REQUIRE(a.size() == 2);
    for (int i : a.indices()) ++hits[static_cast<std::size_t>(i)];
  }
  for (int h : hits) CHECK(std::abs(h - 2000) < 4 * std::sqrt(2000.0));
}

TEST_CASE("SC phase lengths are floor(1.6^i)") {
  const auto lengths = sc_phase_lengths(1'000'000'000);
  REQUIRE(lengths.size() >= 30);
  __int128 num = 1, den = 1;
  for (int i = 1; i <= 30; ++i) {
    num *= 8;
    den *= 5;
    CHECK(lengths[static_cast<std::size_t>(i - 1)] == static_cast<std::int64_t>(num / den));
  }
}

TEST_CASE("SC means by phase") {
  auto c = config(AdversaryKind::SC, {10, 3, 200, 1.0});
  c.alpha_check = 0.01;
  ScAdversary adv(c);
  CHECK(adv.phase(1) == 1);
  CHECK(adv.mean(1, 0) == doctest::Approx(0.99));
  CHECK(adv.mean(1, 5) == 1.0);
  // phase 1 has length 1, phase 2 length 2
  CHECK(adv.phase(2) == 2);
  CHECK(adv.mean(2, 0) == 0.0);
  CHECK(adv.mean(2, 5) == doctest::Approx(0.01));
  CHECK(adv.phase(4) == 3);
  CHECK(adv.phase(7) == 3);
  CHECK(adv.phase(8) == 4);

  auto d = c;
  d.alpha_check = 0.0;
  ScAdversary det(d);
  for (std::int64_t t = 1; t <= 200; ++t) {
    const auto l = det.loss(t);
    for (int x = 0; x < 10; ++x) {
      CHECK(l[x] == det.mean(t, x));
      CHECK((l[x] == 0.0 || l[x] == 1.0));
    }
  }
  auto bad = c;
  bad.alpha_check = 2.0;
  CHECK_THROWS_AS(ScAdversary{bad}, InvalidArgument);
}

TEST_CASE("SC draws are Bernoulli with the phase mean") {
  auto c = config(AdversaryKind::SC, {4, 2, 20000, 1.0}, 5);
  c.alpha_check = 0.3;
  ScAdversary adv(c);
  double sum = 0, expect = 0;
  for (std::int64_t t = 1; t <= 20000; ++t) {
    sum += adv.loss(t)[3];
    expect += adv.mean(t, 3);
  }
  CHECK(std::abs(sum - expect) < 4 * std::sqrt(20000 * 0.25));
}

TEST_CASE("replay adversary") {
  auto r = ReplayAdversary::parse("0,0\n0.5,1\n0.5,1\n");
  CHECK(r.horizon() == 3);
  CHECK(r.dimension() == 2);
  CHECK(r.loss(1).values() == std::vector<double>{0, 0});
  CHECK(r.loss(2).values() == r.loss(3).values());
  CHECK_THROWS_AS(r.loss(4), InvalidArgument);
  CHECK_THROWS_AS(ReplayAdversary::parse("0,0\n0.5\n"), InvalidArgument);
  CHECK_THROWS_AS(ReplayAdversary::parse("0,1.5\n"), InvalidArgument);
  CHECK_THROWS_AS(ReplayAdversary::parse("0,abc\n"), InvalidArgument);
  CHECK_THROWS_AS(ReplayAdversary::from_file("/nonexistent/replay.csv"), InvalidArgument);

  const auto path = std::filesystem::temp_directory_path() / "combat_replay_test.csv";
  {
    std::ofstream f(path);
    f << "0.1,0.2,0.3\n0.4,0.5,0.6\n";
  }
  AdversaryConfig c;
  c.kind = AdversaryKind::Replay;
  c.spec = {3, 1, 2, 1.0};
  c.replay_path = path;
  CHECK(make_adversary(c)->loss(2).values() == std::vector<double>{0.4, 0.5, 0.6});
  c.spec = {3, 1, 3, 1.0};
  CHECK_THROWS_AS(make_adversary(c), InvalidArgument);
  c.spec = {4, 1, 2, 1.0};
  CHECK_THROWS_AS(make_adversary(c), InvalidArgument);
  std::filesystem::remove(path);
}

TEST_CASE("feedback extraction") {
  const std::vector<int> idx = {0, 2};
  const auto a = CombinatorialArm::from_indices(3, idx);
  const auto l = LossVector::per_round({0.2, 0.5, 0.9});
  const auto b = extract_feedback(a, l, Feedback::Bandit);
  CHECK(b.bandit_value == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(b.semibandit_vector.empty());
  const auto s = extract_feedback(a, l, Feedback::SemiBandit);
  CHECK(s.semibandit_vector == std::vector<double>{0.2, 0.0, 0.9});
  CHECK(s.semibandit_vector[0] + s.semibandit_vector[2] == s.bandit_value);
  const auto zero = extract_feedback(a, LossVector::per_round({0.0, 1.0, 0.0}), Feedback::Bandit);
  CHECK(zero.bandit_value == 0.0);
}

TEST_CASE("CIN clipping is rare at theorem scale") {
  const ProblemSpec s{10, 3, 4096, 1.0};
  const auto p = cin_parameters(s, 1.0);
  const double bound = p.epsilon / (4.0 * (1.0 + p.epsilon));
  long clipped_rounds = 0, rounds = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    CinAdversary adv(config(AdversaryKind::CIN, s, seed));
    for (std::int64_t t = 1; t <= 4096; ++t) {
      const auto raw = adv.unclipped(t);
      bool any = false;
      for (double x : raw) any = any || x < 0.0 || x > 1.0;
      clipped_rounds += any;
      ++rounds;
    }
  }
  const double frac = static_cast<double>(clipped_rounds) / rounds;
  const double se = std::sqrt(std::max(frac * (1 - frac), 1e-300) / rounds);
  CHECK(frac <= bound + 3 * se);
}
