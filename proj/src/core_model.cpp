#include "combat/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace combat {

void ProblemSpec::validate() const {
  if (K < 1) throw InvalidArgument("K must be >= 1, got " + std::to_string(K));
  if (I < 1 || I > K) {
    throw InvalidArgument("I must satisfy 1 <= I <= K, got I=" + std::to_string(I) +
                          " K=" + std::to_string(K));
  }
  if (T < 1) throw InvalidArgument("T must be >= 1, got " + std::to_string(T));
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("lambda must be finite and >= 0");
  }
}

std::string to_string(Feedback mode) {
  return mode == Feedback::Bandit ? "bandit" : "semibandit";
}

Feedback parse_feedback(const std::string& text) {
  if (text == "bandit") return Feedback::Bandit;
  if (text == "semibandit" || text == "semi-bandit") return Feedback::SemiBandit;
  throw InvalidArgument("unknown feedback mode '" + text + "'");
}

CombinatorialArm CombinatorialArm::from_bits(std::vector<std::uint8_t> bits, int I) {
  int ones = 0;
  for (auto b : bits) {
    if (b > 1) throw InvalidArgument("arm entries must be 0 or 1");
    ones += b;
  }
  if (ones != I) {
    throw InvalidArgument("arm has " + std::to_string(ones) + " ones, expected " +
                          std::to_string(I));
  }
  CombinatorialArm arm;
  arm.bits_ = std::move(bits);
  arm.size_ = ones;
  return arm;
}

CombinatorialArm CombinatorialArm::from_indices(int K, std::span<const int> indices) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(K), 0);
  for (int i : indices) {
    if (i < 0 || i >= K) throw InvalidArgument("arm index out of range");
    if (bits[static_cast<std::size_t>(i)]) throw InvalidArgument("duplicate arm index");
    bits[static_cast<std::size_t>(i)] = 1;
  }
  return from_bits(std::move(bits), static_cast<int>(indices.size()));
}

std::vector<int> CombinatorialArm::indices() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(size_));
  for (int i = 0; i < dimension(); ++i) {
    if (bits_[static_cast<std::size_t>(i)]) out.push_back(i);
  }
  return out;
}

std::string to_string(const CombinatorialArm& arm) {
  std::string s = "(";
  for (int i = 0; i < arm.dimension(); ++i) {
    if (i) s += ',';
    s += arm.contains(i) ? '1' : '0';
  }
  return s + ")";
}

LossVector::LossVector(std::vector<double> values, double lo, double hi)
    : values_(std::move(values)), lo_(lo), hi_(hi) {
  if (!(lo <= hi)) throw InvalidArgument("loss bounds inverted");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!(v >= lo && v <= hi)) {
      throw InvalidArgument("loss[" + std::to_string(i) + "]=" + std::to_string(v) +
                            " outside [" + std::to_string(lo) + ", " + std::to_string(hi) +
                            "]");
    }
  }
}

double inner(const CombinatorialArm& arm, std::span<const double> loss) {
  if (static_cast<int>(loss.size()) != arm.dimension()) {
    throw InvalidArgument("dimension mismatch between arm and loss");
  }
  double s = 0.0;
  for (int i = 0; i < arm.dimension(); ++i) {
    if (arm.contains(i)) s += loss[static_cast<std::size_t>(i)];
  }
  return s;
}

double switch_distance(const CombinatorialArm& current,
                       const std::optional<CombinatorialArm>& previous) {
  if (!previous) return static_cast<double>(current.size());
  if (previous->dimension() != current.dimension()) {
    throw InvalidArgument("dimension mismatch in switch_distance");
  }
  int differing = 0;
  for (int i = 0; i < current.dimension(); ++i) {
    differing += current.contains(i) != previous->contains(i);
  }
  return 0.5 * differing;
}

std::int64_t BatchSchedule::total() const {
  return std::accumulate(lengths.begin(), lengths.end(), std::int64_t{0});
}

void BatchSchedule::validate(std::int64_t T) const {
  if (lengths.empty()) throw InvalidArgument("batch schedule is empty");
  for (auto b : lengths) {
    if (b < 1) throw InvalidArgument("batch lengths must be positive");
  }
  if (total() != T) {
    throw InvalidArgument("batch lengths sum to " + std::to_string(total()) + ", expected " +
                          std::to_string(T));
  }
}

namespace {
constexpr long double kRoundingSlack = 1e-12L;
}

std::int64_t stable_ceil(long double x) {
  return static_cast<std::int64_t>(std::ceil(x - kRoundingSlack * std::max(1.0L, std::fabs(x))));
}

std::int64_t stable_floor(long double x) {
  return static_cast<std::int64_t>(std::floor(x + kRoundingSlack * std::max(1.0L, std::fabs(x))));
}

BatchSchedule make_schedule(std::int64_t T, std::int64_t B) {
  if (T < 1) throw InvalidArgument("horizon must be >= 1");
  B = std::max<std::int64_t>(B, 1);
  const std::int64_t full = T / B;
  BatchSchedule s;
  s.lengths.assign(static_cast<std::size_t>(full), B);
  if (const std::int64_t rest = T - full * B; rest > 0) s.lengths.push_back(rest);
  return s;
}

namespace {
long double cbrtl_of(long double x) { return std::cbrt(x); }
}  // namespace

BatchSchedule batch_schedule_exp2(const ProblemSpec& spec) {
  spec.validate();
  const long double lam23 = std::pow(static_cast<long double>(spec.lambda), 2.0L / 3.0L);
  const long double b = lam23 * cbrtl_of(static_cast<long double>(spec.T)) /
                        cbrtl_of(static_cast<long double>(spec.K) * spec.I);
  return make_schedule(spec.T, stable_ceil(b));
}

BatchSchedule batch_schedule_broad(const ProblemSpec& spec) {
  spec.validate();
  const long double lam23 = std::pow(static_cast<long double>(spec.lambda), 2.0L / 3.0L);
  const long double b = cbrtl_of(static_cast<long double>(spec.T) * spec.I) * lam23 /
                            cbrtl_of(static_cast<long double>(spec.K)) +
                        1.0L;
  return make_schedule(spec.T, stable_floor(b));
}

BatchSchedule batch_schedule_experiment(const ProblemSpec& spec, Feedback mode) {
  spec.validate();
  const long double lam23 = std::pow(static_cast<long double>(spec.lambda), 2.0L / 3.0L);
  const long double k13 = cbrtl_of(static_cast<long double>(spec.K));
  const long double t13 = cbrtl_of(static_cast<long double>(spec.T));
  const long double i13 = cbrtl_of(static_cast<long double>(spec.I));
  const long double b = mode == Feedback::Bandit ? 3.0L * lam23 / k13 * t13 * i13
                                                 : 3.0L * lam23 / k13 * t13 * i13 * i13;
  return make_schedule(spec.T, stable_ceil(b));
}

RegretLedger::RegretLedger(int K) : per_arm_cum_loss_(static_cast<std::size_t>(K), 0.0) {
  if (K < 1) throw InvalidArgument("ledger dimension must be >= 1");
}

void RegretLedger::record_round(const CombinatorialArm& action, std::span<const double> loss,
                                double lambda) {
  if (action.dimension() != dimension() || static_cast<int>(loss.size()) != dimension()) {
    throw InvalidArgument("dimension mismatch in record_round");
  }
  const double d = switch_distance(action, prev_arm_);
  cum_play_loss_ += inner(action, loss);
  cum_switch_cost_ += lambda * d;
  switches_ += d;
  for (std::size_t i = 0; i < loss.size(); ++i) per_arm_cum_loss_[i] += loss[i];
  if (!prev_arm_ || !(*prev_arm_ == action)) prev_arm_ = action;
  ++rounds_;
}

std::pair<CombinatorialArm, double> hindsight_best(std::span<const double> per_arm_cum_loss,
                                                   int I) {
  const int K = static_cast<int>(per_arm_cum_loss.size());
  if (I < 1 || I > K) throw InvalidArgument("hindsight_best: I out of range");
  std::vector<int> order(static_cast<std::size_t>(K));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return per_arm_cum_loss[static_cast<std::size_t>(a)] <
           per_arm_cum_loss[static_cast<std::size_t>(b)];
  });
  order.resize(static_cast<std::size_t>(I));
  std::sort(order.begin(), order.end());
  double value = 0.0;
  for (int i : order) value += per_arm_cum_loss[static_cast<std::size_t>(i)];
  return {CombinatorialArm::from_indices(K, order), value};
}

std::pair<CombinatorialArm, double> hindsight_best(const RegretLedger& ledger, int I) {
  if (ledger.rounds() == 0) throw InvalidArgument("hindsight_best: empty ledger");
  return hindsight_best(std::span<const double>(ledger.per_arm_cum_loss()), I);
}

double lambda_switching_regret(const RegretLedger& ledger, int I) {
  const double best = hindsight_best(ledger, I).second;
  return ledger.cum_play_loss() + ledger.cum_switch_cost() - best;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return std::round(r);
}

}  // namespace combat
