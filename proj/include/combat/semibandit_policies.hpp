#pragma once

// Semi-bandit learners over the capped simplex Co(A) = {0 <= a <= 1, sum a = I}:
// batched log-barrier mirror descent with learning-rate halving epochs, and
// the batched FTRL baselines with hybrid and negentropy regularisers.

#include <cstdint>
#include <span>
#include <vector>

#include "combat/core_model.hpp"
#include "combat/policy.hpp"
#include "combat/random.hpp"

namespace combat {

/// Lower clamp applied to hull coordinates that get divided by.
inline constexpr double kInteriorFloor = 1e-12;

/// A point of the capped simplex.
class HullPoint {
 public:
  HullPoint() = default;
  /// Throws unless 0 <= a_i <= 1 (within 1e-12) and |sum a - I| <= 1e-9.
  HullPoint(std::vector<double> a, int I);

  int dimension() const { return static_cast<int>(a_.size()); }
  int I() const { return I_; }
  double operator[](int i) const { return a_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& values() const { return a_; }

 private:
  std::vector<double> a_;
  int I_ = 0;
};

/// Minimiser of sum_i ln(1/a_i) over Co(A): the uniform point I/K.
HullPoint barrier_minimizer(int K, int I);

/// (1/eta) sum_i ln(1/a_i).
double barrier_value(std::span<const double> a, double eta);
/// D_F(p, q) = F(p) - F(q) - <grad F(q), p - q> for the barrier above.
double barrier_bregman(std::span<const double> p, std::span<const double> q, double eta);

/// argmin_{a in Co(A)} <a, estimator> + D_{F_eta}(a, a_prime).
///
/// Stationarity gives 1/a_i = 1/a'_i + eta (l_i + mu), capped at a_i = 1. With
/// nu = eta mu the coordinate map is a_i(nu) = 1 / max(1, c_i + nu),
/// c_i = 1/a'_i + eta l_i, nonincreasing in nu; nu is bracketed, bisected and
/// Newton-polished until |sum a - I| <= 1e-10. Outputs are floored at 1e-12.
HullPoint omd_step(const HullPoint& a_prime, std::span<const double> estimator, double eta);

/// Bregman projection of a_prime onto Co(A); the identity for feasible input.
HullPoint bregman_project(std::span<const double> a_prime, int I, double eta);

struct KktReport {
  double sum_residual = 0.0;         // |sum a - I|
  double stationarity = 0.0;         // max over uncapped i of |a_i - 1/(c_i + nu)|
  double complementary = 0.0;        // max over i of |(a_i - 1) beta_i|
  double min_cap_multiplier = 0.0;   // min beta_i over capped coordinates (>= 0 at optimum)
  double nu = 0.0;                   // recovered eta * mu
};

/// KKT diagnostics of `a` as a solution of omd_step(a_prime, estimator, eta).
KktReport omd_kkt_report(std::span<const double> a_prime, std::span<const double> estimator,
                         double eta, int I, std::span<const double> a);

struct VertexDecomposition {
  std::vector<CombinatorialArm> vertices;
  std::vector<double> weights;

  /// sum_j w_j v_j.
  std::vector<double> reconstruct() const;
  /// Draws a vertex with probability equal to its weight.
  std::size_t sample(double u) const;
};

/// Greedy peeling of a hull point into at most K vertices: repeatedly take the
/// I largest residual coordinates (ties to the lowest index) with weight
/// min(min selected residual, mass - max unselected residual).
VertexDecomposition decompose_hull_point(const HullPoint& a);

/// eta = min{1/(18 I B^2), 1/81} with B the schedule's leading batch length.
double broad_parameters(const ProblemSpec& spec, const BatchSchedule& schedule);

enum class EpochReset {
  Barrier,      // restart a' at the barrier minimiser (literal reading)
  KeepIterate,  // keep the learned a' and only halve eta
};

enum class ThresholdRate {
  Initial,  // K ln T / (3 eta_0^2)
  Current,  // K ln T / (3 eta_n^2)
};

struct BroadOptions {
  EpochReset reset = EpochReset::Barrier;
  ThresholdRate threshold = ThresholdRate::Initial;
};

class BroadState {
 public:
  BroadState(int K, int I, std::int64_t T, double eta0, BroadOptions options = {});

  const HullPoint& a_prime() const { return a_prime_; }
  double eta() const { return eta_; }
  double eta0() const { return eta0_; }
  std::int64_t epoch_start() const { return epoch_start_; }
  std::int64_t batch_index() const { return batch_index_; }
  int epochs_completed() const { return epochs_; }
  double epoch_accumulator() const { return accumulator_; }
  double threshold() const;
  const BroadOptions& options() const { return options_; }

  /// a_n: projection of a'_n under the current rate.
  HullPoint current_point() const;

  /// Importance-weighted estimator, mirror step and epoch bookkeeping for
  /// one batch. `a_n` is the sampling marginal used to pick `played`.
  void update(const CombinatorialArm& played, std::span<const double> semibandit_loss,
              const HullPoint& a_n);

  /// (played_i * loss_i / a_n_i)_i. Throws if a played coordinate is below the floor.
  static std::vector<double> estimator(const CombinatorialArm& played,
                                       std::span<const double> semibandit_loss,
                                       const HullPoint& a_n);

 private:
  int K_;
  int I_;
  std::int64_t T_;
  double eta0_;
  double eta_;
  BroadOptions options_;
  HullPoint a_prime_;
  double accumulator_ = 0.0;
  std::int64_t epoch_start_ = 0;
  std::int64_t batch_index_ = 1;
  int epochs_ = 0;
};

enum class Regularizer { Hybrid, NegEntropy };

/// argmin_{a in Co(A)} <a, cumulative> + F(a)/eta for the given regulariser
/// (hybrid uses gamma = 1).
HullPoint ftrl_point(Regularizer reg, std::span<const double> cumulative, int I, double eta);

/// Follow-the-regularised-leader over Co(A) with eta_n = 1/sqrt(n).
class FtrlState {
 public:
  FtrlState(Regularizer reg, int K, int I);

  Regularizer regularizer() const { return reg_; }
  const HullPoint& current_point() const { return point_; }
  const std::vector<double>& cumulative_estimate() const { return cumulative_; }
  std::int64_t batches_seen() const { return batches_; }

  /// Adds the importance-weighted estimate for one batch and re-solves.
  void step(const CombinatorialArm& played, std::span<const double> semibandit_loss);

 private:
  Regularizer reg_;
  int I_;
  std::vector<double> cumulative_;
  HullPoint point_;
  std::int64_t batches_ = 0;
};

class BroadPolicy final : public BatchedPolicy {
 public:
  BroadPolicy(const ProblemSpec& spec, double eta0, BroadOptions options = {});

  std::string id() const override { return "batched-broad"; }
  Feedback required_feedback() const override { return Feedback::SemiBandit; }
  CombinatorialArm select(SplitMixRng& rng) override;
  void observe(const FeedbackView& feedback) override;
  std::vector<std::pair<std::string, std::string>> metadata() const override;

  const BroadState& state() const { return state_; }

 private:
  BroadState state_;
  HullPoint last_point_;
  CombinatorialArm last_arm_;
};

class FtrlPolicy final : public BatchedPolicy {
 public:
  FtrlPolicy(const ProblemSpec& spec, Regularizer reg);

  std::string id() const override;
  Feedback required_feedback() const override { return Feedback::SemiBandit; }
  CombinatorialArm select(SplitMixRng& rng) override;
  void observe(const FeedbackView& feedback) override;
  std::vector<std::pair<std::string, std::string>> metadata() const override;

  const FtrlState& state() const { return state_; }

 private:
  FtrlState state_;
  CombinatorialArm last_arm_;
};

}  // namespace combat
