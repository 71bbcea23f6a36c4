#include "combat/semibandit_policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace combat {

namespace {

constexpr double kSumTolerance = 1e-10;

std::string describe(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

// Finds nu with total(nu) = target for a continuous nonincreasing `total`,
// given total(lo) >= target >= total(hi). Bisection down to a relative width
// of 1e-13, then Newton steps that must stay inside the bracket.
template <class Total, class Slope>
double solve_nonincreasing(Total&& total, Slope&& slope, double lo, double hi, double target) {
  const double at_lo = total(lo);
  const double at_hi = total(hi);
  if (!(at_lo >= target - kSumTolerance && at_hi <= target + kSumTolerance)) {
    throw std::runtime_error("dual root-finder failed to bracket: total(" + describe(lo) +
                             ")=" + describe(at_lo) + ", total(" + describe(hi) +
                             ")=" + describe(at_hi) + ", target " + describe(target));
  }
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= 1e-13 * std::max(1.0, std::abs(mid)) || mid <= lo || mid >= hi) break;
    if (total(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double nu = 0.5 * (lo + hi);
  for (int it = 0; it < 16; ++it) {
    const double r = total(nu) - target;
    if (std::abs(r) <= 1e-14 * std::max(1.0, target)) break;
    const double s = slope(nu);
    if (!(s < 0.0)) break;
    const double next = nu - r / s;
    if (!(next >= lo && next <= hi) || next == nu) break;
    nu = next;
  }
  return nu;
}

void check_eta(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidArgument("learning rate must be > 0");
}

std::vector<double> all_ones(std::size_t K) { return std::vector<double>(K, 1.0); }

// Log-barrier mirror step on c_i = 1/a'_i + eta * l_i.
std::vector<double> solve_barrier(std::span<const double> a_prime,
                                  std::span<const double> estimator, double eta, int I) {
  check_eta(eta);
  const std::size_t K = a_prime.size();
  if (estimator.size() != K) throw InvalidArgument("estimator dimension mismatch");
  if (I < 1 || I > static_cast<int>(K)) throw InvalidArgument("I out of range for hull point");
  std::vector<double> c(K);
  for (std::size_t i = 0; i < K; ++i) {
    const double ap = a_prime[i];
    if (!(ap <= 1.0 + 1e-12)) {
      throw InvalidArgument("reference point coordinate " + std::to_string(i) + " = " +
                            describe(ap) + " exceeds the cap 1");
    }
    if (!std::isfinite(estimator[i])) throw InvalidArgument("estimator is not finite");
    c[i] = 1.0 / std::max(ap, kInteriorFloor) + eta * estimator[i];
  }
  if (I == static_cast<int>(K)) return all_ones(K);
  const auto coord = [&](std::size_t i, double nu) {
    const double d = c[i] + nu;
    return d <= 1.0 ? 1.0 : 1.0 / d;
  };
  const auto total = [&](double nu) {
    double s = 0.0;
    for (std::size_t i = 0; i < K; ++i) s += coord(i, nu);
    return s;
  };
  const auto slope = [&](double nu) {
    double s = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
      const double d = c[i] + nu;
      if (d > 1.0) s -= 1.0 / (d * d);
    }
    return s;
  };
  const auto [cmin, cmax] = std::minmax_element(c.begin(), c.end());
  const double lo = 1.0 - *cmax;
  const double hi = static_cast<double>(K) / I - *cmin;
  const double nu = solve_nonincreasing(total, slope, lo, hi, static_cast<double>(I));
  std::vector<double> a(K);
  for (std::size_t i = 0; i < K; ++i) a[i] = std::max(coord(i, nu), kInteriorFloor);
  const double sum = std::accumulate(a.begin(), a.end(), 0.0);
  if (std::abs(sum - I) > kSumTolerance) {
    throw std::runtime_error("log-barrier step missed the sum constraint: |sum - I| = " +
                             describe(std::abs(sum - I)));
  }
  return a;
}

}  // namespace

HullPoint::HullPoint(std::vector<double> a, int I) : a_(std::move(a)), I_(I) {
  if (I < 1 || I > static_cast<int>(a_.size())) throw InvalidArgument("HullPoint: I out of range");
  double sum = 0.0;
  for (auto& x : a_) {
    if (!(x >= -1e-12 && x <= 1.0 + 1e-12)) {
      throw InvalidArgument("HullPoint coordinate " + describe(x) + " outside [0, 1]");
    }
    x = std::min(std::max(x, 0.0), 1.0);
    sum += x;
  }
  if (std::abs(sum - I) > 1e-9) {
    throw InvalidArgument("HullPoint coordinates sum to " + describe(sum) + ", expected " +
                          std::to_string(I));
  }
}

HullPoint barrier_minimizer(int K, int I) {
  if (I < 1 || I > K) throw InvalidArgument("barrier_minimizer needs 1 <= I <= K");
  return HullPoint(std::vector<double>(static_cast<std::size_t>(K), static_cast<double>(I) / K), I);
}

double barrier_value(std::span<const double> a, double eta) {
  double s = 0.0;
  for (double x : a) s -= std::log(x);
  return s / eta;
}

double barrier_bregman(std::span<const double> p, std::span<const double> q, double eta) {
  if (p.size() != q.size()) throw InvalidArgument("barrier_bregman dimension mismatch");
  // grad F(q)_i = -1/(eta q_i); summed termwise for accuracy.
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double ratio = p[i] / q[i];
    s += ratio - 1.0 - std::log(ratio);
  }
  return s / eta;
}

HullPoint omd_step(const HullPoint& a_prime, std::span<const double> estimator, double eta) {
  return HullPoint(solve_barrier(a_prime.values(), estimator, eta, a_prime.I()), a_prime.I());
}

HullPoint bregman_project(std::span<const double> a_prime, int I, double eta) {
  const std::vector<double> zero(a_prime.size(), 0.0);
  return HullPoint(solve_barrier(a_prime, zero, eta, I), I);
}

KktReport omd_kkt_report(std::span<const double> a_prime, std::span<const double> estimator,
                         double eta, int I, std::span<const double> a) {
  const std::size_t K = a.size();
  KktReport report;
  std::vector<double> c(K);
  for (std::size_t i = 0; i < K; ++i) {
    c[i] = 1.0 / std::max(a_prime[i], kInteriorFloor) + eta * estimator[i];
  }
  // nu from uncapped coordinates: 1/a_i = c_i + nu.
  double nu_sum = 0.0;
  int uncapped = 0;
  for (std::size_t i = 0; i < K; ++i) {
    if (a[i] < 1.0 - 1e-9) {
      nu_sum += 1.0 / a[i] - c[i];
      ++uncapped;
    }
  }
  report.nu = uncapped ? nu_sum / uncapped : 1.0 - *std::max_element(c.begin(), c.end());
  double sum = 0.0;
  report.min_cap_multiplier = 0.0;
  for (std::size_t i = 0; i < K; ++i) {
    sum += a[i];
    const double d = c[i] + report.nu;
    if (a[i] < 1.0 - 1e-9) {
      report.stationarity = std::max(report.stationarity, std::abs(a[i] - 1.0 / d));
    } else {
      // beta_i = (1 - c_i - nu)/eta must be >= 0 on the cap.
      const double beta = (1.0 - d) / eta;
      report.min_cap_multiplier = std::min(report.min_cap_multiplier, beta);
      report.complementary = std::max(report.complementary, std::abs((a[i] - 1.0) * beta));
    }
  }
  report.sum_residual = std::abs(sum - I);
  return report;
}

std::vector<double> VertexDecomposition::reconstruct() const {
  if (vertices.empty()) return {};
  std::vector<double> a(static_cast<std::size_t>(vertices.front().dimension()), 0.0);
  for (std::size_t j = 0; j < vertices.size(); ++j) {
    for (int i = 0; i < vertices[j].dimension(); ++i) {
      if (vertices[j].contains(i)) a[static_cast<std::size_t>(i)] += weights[j];
    }
  }
  return a;
}

std::size_t VertexDecomposition::sample(double u) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    acc += weights[j];
    if (u < acc) return j;
  }
  return weights.size() - 1;
}

VertexDecomposition decompose_hull_point(const HullPoint& a) {
  const int K = a.dimension();
  const int I = a.I();
  constexpr double kUlps = 8 * std::numeric_limits<double>::epsilon();
  constexpr double kNegligible = 1e-9;
  std::vector<double> r = a.values();
  const double sum = std::accumulate(r.begin(), r.end(), 0.0);
  for (auto& x : r) x = std::min(1.0, x * I / sum);
  double mass = 1.0;
  VertexDecomposition out;
  std::vector<int> order(static_cast<std::size_t>(K));
  for (int iter = 0; iter <= K; ++iter) {
    if (mass <= kUlps) break;
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
      return r[static_cast<std::size_t>(x)] > r[static_cast<std::size_t>(y)];
    });
    const auto in = [&](int k) -> double& { return r[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])]; };
    int bottom = 0;
    for (int k = 1; k < I; ++k) {
      if (in(k) <= in(bottom)) bottom = k;
    }
    double w = std::min(mass, in(bottom));
    bool drop_bottom = true;
    bool lift_out = false;
    if (I < K && in(I) > 0.0 && mass - in(I) < w) {
      w = mass - in(I);
      drop_bottom = false;
      lift_out = true;
    }
    if (!(w > 0.0)) {
      if (mass <= kNegligible) break;
      throw std::runtime_error("hull decomposition stalled (weight " + describe(w) +
                               ", remaining mass " + describe(mass) + ")");
    }
    std::vector<int> chosen(order.begin(), order.begin() + I);
    std::sort(chosen.begin(), chosen.end());
    out.vertices.push_back(CombinatorialArm::from_indices(K, chosen));
    out.weights.push_back(w);
    const double old_mass = mass;
    mass -= w;
    for (int k = 0; k < I; ++k) {
      double& x = in(k);
      const double before = x;
      x -= w;
      if (x <= kUlps * before) x = 0.0;
    }
    if (drop_bottom) in(bottom) = 0.0;
    if (lift_out) in(I) = mass;
    for (int k = I; k < K; ++k) {
      double& x = in(k);
      if (x > mass || mass - x <= kUlps * old_mass) x = std::max(mass, 0.0);
    }
  }
  if (mass > kNegligible) {
    throw std::runtime_error("hull decomposition did not terminate within K+1 steps (mass left " +
                             describe(mass) + ")");
  }
  const double total = std::accumulate(out.weights.begin(), out.weights.end(), 0.0);
  for (auto& w : out.weights) w /= total;
  return out;
}

double broad_parameters(const ProblemSpec& spec, const BatchSchedule& schedule) {
  spec.validate();
  schedule.validate(spec.T);
  const double B = static_cast<double>(schedule.nominal_length());
  return std::min(1.0 / (18.0 * spec.I * B * B), 1.0 / 81.0);
}

BroadState::BroadState(int K, int I, std::int64_t T, double eta0, BroadOptions options)
    : K_(K), I_(I), T_(T), eta0_(eta0), eta_(eta0), options_(options),
      a_prime_(barrier_minimizer(K, I)) {
  check_eta(eta0);
  if (T < 1) throw InvalidArgument("BROAD horizon must be >= 1");
}

double BroadState::threshold() const {
  const double rate = options_.threshold == ThresholdRate::Initial ? eta0_ : eta_;
  return K_ * std::log(static_cast<double>(T_)) / (3.0 * rate * rate);
}

HullPoint BroadState::current_point() const {
  return bregman_project(a_prime_.values(), I_, eta_);
}

std::vector<double> BroadState::estimator(const CombinatorialArm& played,
                                          std::span<const double> semibandit_loss,
                                          const HullPoint& a_n) {
  const int K = played.dimension();
  if (static_cast<int>(semibandit_loss.size()) != K || a_n.dimension() != K) {
    throw InvalidArgument("estimator dimension mismatch");
  }
  std::vector<double> est(static_cast<std::size_t>(K), 0.0);
  for (int i = 0; i < K; ++i) {
    if (!played.contains(i)) continue;
    if (a_n[i] < kInteriorFloor) {
      throw InvalidArgument("played coordinate " + std::to_string(i) +
                            " has marginal below the interior floor");
    }
    est[static_cast<std::size_t>(i)] = semibandit_loss[static_cast<std::size_t>(i)] / a_n[i];
  }
  return est;
}

void BroadState::update(const CombinatorialArm& played, std::span<const double> semibandit_loss,
                        const HullPoint& a_n) {
  const auto est = estimator(played, semibandit_loss, a_n);
  a_prime_ = omd_step(a_prime_, est, eta_);
  for (int i = 0; i < K_; ++i) {
    if (played.contains(i)) {
      const double v = semibandit_loss[static_cast<std::size_t>(i)];
      accumulator_ += v * v;
    }
  }
  if (accumulator_ >= threshold()) {
    eta_ /= 2.0;
    epoch_start_ = batch_index_;
    ++epochs_;
    accumulator_ = 0.0;
    if (options_.reset == EpochReset::Barrier) a_prime_ = barrier_minimizer(K_, I_);
  }
  ++batch_index_;
}

namespace {

// Hybrid regulariser F(a) = sum -sqrt(a) + (1 - a) ln(1 - a); its derivative
// g(a) = -1/(2 sqrt a) - ln(1 - a) - 1 is increasing from -inf to +inf, so
// each coordinate is g^{-1}(target). Inverted in logit space a = 1/(1+e^{-s}).
struct HybridCoordinate {
  static double a_of(double s) { return 1.0 / (1.0 + std::exp(-s)); }
  static double softplus(double s) { return s > 0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s)); }
  static double g_of_s(double s) {
    const double a = a_of(s);
    return -0.5 / std::sqrt(a) + softplus(s) - 1.0;
  }
  static double dg_ds(double s) {
    const double a = a_of(s);
    const double one_minus = 1.0 / (1.0 + std::exp(s));
    return one_minus / (4.0 * std::sqrt(a)) + a;
  }
  static double inverse(double target) {
    double lo = -1.0, hi = 1.0;
    while (g_of_s(lo) > target) lo *= 2.0;
    while (g_of_s(hi) < target) hi *= 2.0;
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      const double f = g_of_s(s) - target;
      if (f == 0.0) break;
      if (f > 0.0) hi = s; else lo = s;
      double next = s - f / dg_ds(s);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - s) <= 1e-15 * std::max(1.0, std::abs(s))) {
        s = next;
        break;
      }
      s = next;
    }
    return a_of(s);
  }
  static double g(double a) { return -0.5 / std::sqrt(a) - std::log1p(-a) - 1.0; }
  static double dg_da(double a) { return 0.25 / (a * std::sqrt(a)) + 1.0 / (1.0 - a); }
};

}  // namespace

HullPoint ftrl_point(Regularizer reg, std::span<const double> cumulative, int I, double eta) {
  check_eta(eta);
  const std::size_t K = cumulative.size();
  if (I < 1 || I > static_cast<int>(K)) throw InvalidArgument("I out of range for hull point");
  for (double v : cumulative) {
    if (!std::isfinite(v)) throw InvalidArgument("cumulative estimate is not finite");
  }
  if (I == static_cast<int>(K)) return HullPoint(all_ones(K), I);
  std::vector<double> z(K);
  for (std::size_t i = 0; i < K; ++i) z[i] = -eta * cumulative[i];
  const auto [zmin, zmax] = std::minmax_element(z.begin(), z.end());
  const double share = static_cast<double>(I) / static_cast<double>(K);
  std::vector<double> a(K);
  double nu = 0.0;
  if (reg == Regularizer::NegEntropy) {
    const auto coord = [&](std::size_t i, double v) { return std::min(1.0, std::exp(z[i] - v)); };
    const auto total = [&](double v) {
      double s = 0.0;
      for (std::size_t i = 0; i < K; ++i) s += coord(i, v);
      return s;
    };
    const auto slope = [&](double v) {
      double s = 0.0;
      for (std::size_t i = 0; i < K; ++i) {
        const double x = coord(i, v);
        if (x < 1.0) s -= x;
      }
      return s;
    };
    nu = solve_nonincreasing(total, slope, *zmin, *zmax - std::log(share), static_cast<double>(I));
    for (std::size_t i = 0; i < K; ++i) a[i] = coord(i, nu);
  } else {
    const double g_share = HybridCoordinate::g(share);
    const auto total = [&](double v) {
      double s = 0.0;
      for (std::size_t i = 0; i < K; ++i) s += HybridCoordinate::inverse(z[i] - v);
      return s;
    };
    const auto slope = [&](double v) {
      double s = 0.0;
      for (std::size_t i = 0; i < K; ++i) {
        const double x = HybridCoordinate::inverse(z[i] - v);
        if (x < 1.0) s -= 1.0 / HybridCoordinate::dg_da(x);
      }
      return s;
    };
    nu = solve_nonincreasing(total, slope, *zmin - g_share, *zmax - g_share, static_cast<double>(I));
    for (std::size_t i = 0; i < K; ++i) a[i] = HybridCoordinate::inverse(z[i] - nu);
  }
  for (auto& x : a) x = std::max(x, kInteriorFloor);
  return HullPoint(std::move(a), I);
}

FtrlState::FtrlState(Regularizer reg, int K, int I)
    : reg_(reg), I_(I), cumulative_(static_cast<std::size_t>(K), 0.0),
      point_(ftrl_point(reg, cumulative_, I, 1.0)) {}

void FtrlState::step(const CombinatorialArm& played, std::span<const double> semibandit_loss) {
  const auto est = BroadState::estimator(played, semibandit_loss, point_);
  for (std::size_t i = 0; i < est.size(); ++i) cumulative_[i] += est[i];
  ++batches_;
  point_ = ftrl_point(reg_, cumulative_, I_, 1.0 / std::sqrt(static_cast<double>(batches_)));
}

BroadPolicy::BroadPolicy(const ProblemSpec& spec, double eta0, BroadOptions options)
    : state_(spec.K, spec.I, spec.T, eta0, options) {}

CombinatorialArm BroadPolicy::select(SplitMixRng& rng) {
  last_point_ = state_.current_point();
  const auto dec = decompose_hull_point(last_point_);
  last_arm_ = dec.vertices[dec.sample(rng.uniform())];
  return last_arm_;
}

void BroadPolicy::observe(const FeedbackView& feedback) {
  if (feedback.mode != Feedback::SemiBandit) {
    throw InvalidArgument("batched-broad needs semi-bandit feedback");
  }
  state_.update(last_arm_, feedback.semibandit_vector, last_point_);
}

std::vector<std::pair<std::string, std::string>> BroadPolicy::metadata() const {
  return {{"eta0", describe(state_.eta0())},
          {"threshold_rate",
           state_.options().threshold == ThresholdRate::Initial ? "initial" : "current"},
          {"epoch_reset", state_.options().reset == EpochReset::Barrier ? "barrier" : "keep"}};
}

FtrlPolicy::FtrlPolicy(const ProblemSpec& spec, Regularizer reg) : state_(reg, spec.K, spec.I) {}

std::string FtrlPolicy::id() const {
  return state_.regularizer() == Regularizer::Hybrid ? "batched-hybrid" : "batched-negentropy";
}

CombinatorialArm FtrlPolicy::select(SplitMixRng& rng) {
  const auto dec = decompose_hull_point(state_.current_point());
  last_arm_ = dec.vertices[dec.sample(rng.uniform())];
  return last_arm_;
}

void FtrlPolicy::observe(const FeedbackView& feedback) {
  if (feedback.mode != Feedback::SemiBandit) {
    throw InvalidArgument(id() + " needs semi-bandit feedback");
  }
  state_.step(last_arm_, feedback.semibandit_vector);
}

std::vector<std::pair<std::string, std::string>> FtrlPolicy::metadata() const {
  std::vector<std::pair<std::string, std::string>> m{{"learning_rate", "1/sqrt(n)"}};
  if (state_.regularizer() == Regularizer::Hybrid) m.emplace_back("hybrid_gamma", "1");
  return m;
}

}  // namespace combat
