#pragma once

// Oblivious loss-sequence generators. Every generator is a pure function of
// (config, seed, t): the realised sequence never depends on the player.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "combat/core_model.hpp"
#include "combat/tree_noise.hpp"

namespace combat {

enum class AdversaryKind { CIN, CDN, SC, Replay };

std::string to_string(AdversaryKind kind);
AdversaryKind parse_adversary_kind(const std::string& text);

/// How (epsilon, sigma) are derived for CIN/CDN before `scale` is applied.
///   Theorem:    the lower-bound construction values.
///   Experiment: CIN sigma replaced by 1/(9 log2 T), which times scale=10 is
///               the noise level used in the published CIN experiments.
///               CDN is identical under both calibrations.
enum class NoiseCalibration { Theorem, Experiment };

std::string to_string(NoiseCalibration c);
NoiseCalibration parse_noise_calibration(const std::string& text);

struct AdversaryConfig {
  AdversaryKind kind = AdversaryKind::CIN;
  ProblemSpec spec;
  double scale = 1.0;
  double alpha_check = 0.01;  // SC only
  std::uint64_t seed = 0;
  std::optional<CombinatorialArm> chi;  // CIN/CDN hidden best arm
  NoiseCalibration calibration = NoiseCalibration::Theorem;
  std::filesystem::path replay_path;  // Replay only

  void validate() const;
};

struct NoiseParameters {
  double epsilon = 0;
  double sigma = 0;
};

/// Scaled (epsilon, sigma) for the identical-noise sequence. Requires T >= 2.
NoiseParameters cin_parameters(const ProblemSpec& spec, double scale,
                               NoiseCalibration calibration = NoiseCalibration::Theorem);
/// Scaled (epsilon, sigma) for the diverse-noise sequence. Requires T >= 2.
NoiseParameters cdn_parameters(const ProblemSpec& spec, double scale);

/// min(max(x, 0), 1).
double clip_unit(double x);

/// Hidden best arm drawn uniformly from the action set, keyed by seed.
CombinatorialArm draw_hidden_arm(int K, int I, std::uint64_t seed);

class Adversary {
 public:
  virtual ~Adversary() = default;

  /// Loss vector for round t in [1, T].
  virtual LossVector loss(std::int64_t t) = 0;
  virtual std::string id() const = 0;
  virtual int dimension() const = 0;
  virtual std::int64_t horizon() const = 0;

 protected:
  void check_round(std::int64_t t) const;
};

/// Shared walk W_t across coordinates; arms in chi are epsilon cheaper.
class CinAdversary final : public Adversary {
 public:
  explicit CinAdversary(const AdversaryConfig& config);

  LossVector loss(std::int64_t t) override;
  /// Pre-clip losses W_t + 1/2 - epsilon * chi_x.
  std::vector<double> unclipped(std::int64_t t);
  std::string id() const override { return "cin"; }
  int dimension() const override { return chi_.dimension(); }
  std::int64_t horizon() const override { return walk_.horizon(); }

  const CombinatorialArm& chi() const { return chi_; }
  const NoiseParameters& parameters() const { return params_; }

 private:
  NoiseParameters params_;
  CombinatorialArm chi_;
  GaussianWalk walk_;
};

/// One independent walk W_t^x per coordinate.
class CdnAdversary final : public Adversary {
 public:
  explicit CdnAdversary(const AdversaryConfig& config);

  LossVector loss(std::int64_t t) override;
  std::vector<double> unclipped(std::int64_t t);
  std::string id() const override { return "cdn"; }
  int dimension() const override { return chi_.dimension(); }
  std::int64_t horizon() const override { return walk_.horizon(); }

  const CombinatorialArm& chi() const { return chi_; }
  const NoiseParameters& parameters() const { return params_; }

 private:
  NoiseParameters params_;
  CombinatorialArm chi_;
  GaussianWalk walk_;
};

/// Lengths floor(1.6^i) for i = 1, 2, ... until their sum reaches `horizon`.
std::vector<std::int64_t> sc_phase_lengths(std::int64_t horizon);

/// Stochastically constrained adversary: independent Bernoulli losses whose
/// means alternate between odd phases (1 - a*lambda on the first I arms, 1
/// elsewhere) and even phases (0 on the first I arms, a*lambda elsewhere).
class ScAdversary final : public Adversary {
 public:
  explicit ScAdversary(const AdversaryConfig& config);

  LossVector loss(std::int64_t t) override;
  /// 1-based phase index containing round t.
  int phase(std::int64_t t) const;
  /// Bernoulli mean of coordinate `arm` (0-based) at round t.
  double mean(std::int64_t t, int arm) const;
  std::string id() const override { return "sc"; }
  int dimension() const override { return spec_.K; }
  std::int64_t horizon() const override { return spec_.T; }

 private:
  ProblemSpec spec_;
  double alpha_check_;
  std::uint64_t seed_;
  std::vector<std::int64_t> phase_ends_;  // cumulative, inclusive
};

/// Loss rows read from a headerless CSV (one row per round, K values in [0, 1]).
class ReplayAdversary final : public Adversary {
 public:
  explicit ReplayAdversary(std::vector<std::vector<double>> rows);
  static ReplayAdversary from_file(const std::filesystem::path& path);
  static ReplayAdversary parse(const std::string& text);

  LossVector loss(std::int64_t t) override;
  std::string id() const override { return "replay"; }
  int dimension() const override { return dimension_; }
  std::int64_t horizon() const override { return static_cast<std::int64_t>(rows_.size()); }

 private:
  std::vector<std::vector<double>> rows_;
  int dimension_ = 0;
};

std::unique_ptr<Adversary> make_adversary(const AdversaryConfig& config);

/// What a policy gets to see of one (batch) loss.
struct FeedbackView {
  Feedback mode = Feedback::Bandit;
  double bandit_value = 0.0;
  std::vector<double> semibandit_vector;  // empty in bandit mode
};

FeedbackView extract_feedback(const CombinatorialArm& action, std::span<const double> loss,
                              Feedback mode);
inline FeedbackView extract_feedback(const CombinatorialArm& action, const LossVector& loss,
                                     Feedback mode) {
  return extract_feedback(action, std::span<const double>(loss.values()), mode);
}

}  // namespace combat
