#pragma once

// Bandit-feedback learners over the enumerated action set: batched Exp2 with
// exploration mixing and the batched Exp3 baseline over meta-arms.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "combat/core_model.hpp"
#include "combat/policy.hpp"
#include "combat/random.hpp"

namespace combat {

inline constexpr double kMaxEnumeratedArms = 1e6;

/// All C(K, I) arms in lexicographic order of their sorted index sets.
class ArmSet {
 public:
  ArmSet(int K, int I);

  int K() const { return K_; }
  int I() const { return I_; }
  std::size_t size() const { return count_; }
  std::span<const std::uint16_t> indices(std::size_t j) const {
    return {flat_.data() + j * static_cast<std::size_t>(I_), static_cast<std::size_t>(I_)};
  }
  CombinatorialArm arm(std::size_t j) const;
  /// Position of `arm` in the enumeration.
  std::size_t rank(const CombinatorialArm& arm) const;

 private:
  int K_;
  int I_;
  std::size_t count_;
  std::vector<std::uint16_t> flat_;
};

/// Uniform distribution over the enumerated arms. Throws when C(K, I) > 1e6.
std::vector<double> build_exploration_distribution(int K, int I);

struct CovarianceOperator {
  Eigen::MatrixXd matrix;  // E_{A~p}[A A^T]
  Eigen::MatrixXd pinv;
  double rank_tolerance = 1e-10;
  int rank = 0;
  double min_eigenvalue = 0.0;
};

/// Second-moment matrix of p over `arms` and its eigen-decomposition pseudo-inverse;
/// eigenvalues below rank_tolerance * lambda_max are treated as zero.
CovarianceOperator exp2_covariance(std::span<const double> p, const ArmSet& arms,
                                   double rank_tolerance = 1e-10);

struct Exp2Parameters {
  double gamma = 0.0;
  double eta = 0.0;
};

/// eta = sqrt(ln C(K,I) / (3 N K (B I)^2)), gamma = eta B I K with
/// N = floor(T/B) + 1 and B the schedule's leading batch length.
/// Throws when gamma >= 1.
Exp2Parameters exp2_parameters(const ProblemSpec& spec, const BatchSchedule& schedule);

/// Inverse-CDF draw of an index from a probability vector.
std::size_t sample_index(std::span<const double> p, double u);

/// Exponential weights over the action set mixed with an exploration
/// distribution; the loss of the whole batch is estimated by X * Sigma^+ A.
class Exp2State {
 public:
  Exp2State(ArmSet arms, Exp2Parameters params, std::vector<double> mu);

  const ArmSet& arms() const { return arms_; }
  const Exp2Parameters& parameters() const { return params_; }
  const std::vector<double>& q() const { return q_; }
  const std::vector<double>& mu() const { return mu_; }
  std::int64_t batch_index() const { return batch_index_; }

  /// p = (1 - gamma) q + gamma mu.
  std::vector<double> sampling_distribution() const;
  std::size_t select(SplitMixRng& rng) const;
  /// Loss estimate X * Sigma^+ A for the arm at `played` under the current p.
  Eigen::VectorXd estimate(std::size_t played, double batch_loss_total) const;
  void update(std::size_t played, double batch_loss_total);
  void update(const CombinatorialArm& played, double batch_loss_total) {
    update(arms_.rank(played), batch_loss_total);
  }

 private:
  void renormalise();

  ArmSet arms_;
  Exp2Parameters params_;
  std::vector<double> mu_;
  std::vector<double> log_weights_;
  std::vector<double> q_;
  std::int64_t batch_index_ = 1;
};

/// Exponential weights over C(K, I) atomic meta-arms with uniform mixing.
class Exp3State {
 public:
  Exp3State(std::size_t meta_arms, Exp2Parameters params);

  std::size_t size() const { return q_.size(); }
  const std::vector<double>& q() const { return q_; }
  const Exp2Parameters& parameters() const { return params_; }
  std::vector<double> sampling_distribution() const;
  std::size_t select(SplitMixRng& rng) const;
  /// Importance-weighted loss X / p_played charged to the played meta-arm.
  void update(std::size_t played, double batch_loss_total);

 private:
  Exp2Parameters params_;
  std::vector<double> log_weights_;
  std::vector<double> q_;
};

class Exp2Policy final : public BatchedPolicy {
 public:
  Exp2Policy(const ProblemSpec& spec, Exp2Parameters params,
             std::optional<std::vector<double>> mu = std::nullopt);

  std::string id() const override { return "batched-exp2"; }
  Feedback required_feedback() const override { return Feedback::Bandit; }
  CombinatorialArm select(SplitMixRng& rng) override;
  void observe(const FeedbackView& feedback) override;
  std::vector<std::pair<std::string, std::string>> metadata() const override;

  const Exp2State& state() const { return state_; }

 private:
  Exp2State state_;
  std::size_t last_ = 0;
};

class Exp3Policy final : public BatchedPolicy {
 public:
  Exp3Policy(const ProblemSpec& spec, Exp2Parameters params);

  std::string id() const override { return "batched-exp3"; }
  Feedback required_feedback() const override { return Feedback::Bandit; }
  CombinatorialArm select(SplitMixRng& rng) override;
  void observe(const FeedbackView& feedback) override;
  std::vector<std::pair<std::string, std::string>> metadata() const override;

  const Exp3State& state() const { return state_; }

 private:
  ArmSet arms_;
  Exp3State state_;
  std::size_t last_ = 0;
};

}  // namespace combat
