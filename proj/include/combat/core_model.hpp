#pragma once

// Domain types for combinatorial bandits with per-arm switching costs:
// problem dimensions, combinatorial arms (K-bit incidence vectors with
// exactly I ones), bounded loss vectors, batch schedules and the exact
// lambda-switching-regret ledger.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace combat {

/// Raised for any violated precondition or malformed input.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ProblemSpec {
  int K = 0;           // base arms
  int I = 0;           // base arms per combinatorial arm
  std::int64_t T = 0;  // horizon in rounds
  double lambda = 0;   // switching cost per switched base arm

  void validate() const;
};

enum class Feedback { Bandit, SemiBandit };

std::string to_string(Feedback mode);
Feedback parse_feedback(const std::string& text);

/// An element of the action set {A in {0,1}^K : |A|_1 = I}.
class CombinatorialArm {
 public:
  CombinatorialArm() = default;

  /// Throws unless every entry is 0/1 and exactly `I` entries are 1.
  static CombinatorialArm from_bits(std::vector<std::uint8_t> bits, int I);
  /// Arm of dimension K selecting `indices` (distinct, in [0, K)).
  static CombinatorialArm from_indices(int K, std::span<const int> indices);

  int dimension() const { return static_cast<int>(bits_.size()); }
  int size() const { return size_; }
  bool contains(int i) const { return bits_[static_cast<std::size_t>(i)] != 0; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  std::vector<int> indices() const;

  friend bool operator==(const CombinatorialArm&, const CombinatorialArm&) = default;

 private:
  std::vector<std::uint8_t> bits_;
  int size_ = 0;
};

std::string to_string(const CombinatorialArm& arm);

/// Per-round losses live in [0, 1]; per-batch accumulated losses in [0, B_n].
class LossVector {
 public:
  LossVector() = default;
  LossVector(std::vector<double> values, double lo, double hi);

  static LossVector per_round(std::vector<double> values) {
    return LossVector(std::move(values), 0.0, 1.0);
  }

  int dimension() const { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& values() const { return values_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  std::vector<double> values_;
  double lo_ = 0.0;
  double hi_ = 1.0;
};

/// <arm, loss>.
double inner(const CombinatorialArm& arm, std::span<const double> loss);

/// Half the Hamming distance between two arms. An absent `previous` is the
/// all-zeros A_0, so the first action always costs exactly I.
double switch_distance(const CombinatorialArm& current,
                       const std::optional<CombinatorialArm>& previous);

struct BatchSchedule {
  std::vector<std::int64_t> lengths;

  std::size_t count() const { return lengths.size(); }
  std::int64_t total() const;
  /// Leading batch length B (all batches but possibly the last have it).
  std::int64_t nominal_length() const { return lengths.front(); }
  void validate(std::int64_t T) const;
};

/// N-1 batches of length B followed by T-(N-1)B with N = floor(T/B)+1; an
/// empty trailing batch is dropped. B < 1 is clamped to 1.
BatchSchedule make_schedule(std::int64_t T, std::int64_t B);

/// ceil(lambda^{2/3} K^{-1/3} T^{1/3} I^{-1/3}).
BatchSchedule batch_schedule_exp2(const ProblemSpec& spec);
/// floor((TI)^{1/3} lambda^{2/3} K^{-1/3} + 1).
BatchSchedule batch_schedule_broad(const ProblemSpec& spec);
/// Bandit: ceil(3 lambda^{2/3} K^{-1/3} (TI)^{1/3});
/// semi-bandit: ceil(3 lambda^{2/3} K^{-1/3} T^{1/3} I^{2/3}).
BatchSchedule batch_schedule_experiment(const ProblemSpec& spec, Feedback mode);

/// Integer rounding that tolerates representation error of the argument
/// (e.g. 2.9999999999999996 ceils to 3, not 3.0000000000000004 to 4).
std::int64_t stable_ceil(long double x);
std::int64_t stable_floor(long double x);

/// Running totals for the lambda-switching regret of one action sequence.
class RegretLedger {
 public:
  explicit RegretLedger(int K);

  void record_round(const CombinatorialArm& action, std::span<const double> loss, double lambda);
  void record_round(const CombinatorialArm& action, const LossVector& loss, double lambda) {
    record_round(action, std::span<const double>(loss.values()), lambda);
  }

  int dimension() const { return static_cast<int>(per_arm_cum_loss_.size()); }
  std::int64_t rounds() const { return rounds_; }
  double cum_play_loss() const { return cum_play_loss_; }
  double cum_switch_cost() const { return cum_switch_cost_; }
  /// Total of d(A_t, A_{t-1}) over recorded rounds (cost with lambda = 1).
  double switches() const { return switches_; }
  const std::vector<double>& per_arm_cum_loss() const { return per_arm_cum_loss_; }
  const std::optional<CombinatorialArm>& prev_arm() const { return prev_arm_; }

 private:
  double cum_play_loss_ = 0.0;
  double cum_switch_cost_ = 0.0;
  double switches_ = 0.0;
  std::int64_t rounds_ = 0;
  std::vector<double> per_arm_cum_loss_;
  std::optional<CombinatorialArm> prev_arm_;
};

/// Best fixed arm in hindsight: the I smallest cumulative per-arm losses,
/// ties broken toward the lowest index.
std::pair<CombinatorialArm, double> hindsight_best(const RegretLedger& ledger, int I);
std::pair<CombinatorialArm, double> hindsight_best(std::span<const double> per_arm_cum_loss, int I);

double lambda_switching_regret(const RegretLedger& ledger, int I);

/// C(n, k) as a double (exact up to 2^53).
double binomial(int n, int k);

}  // namespace combat
