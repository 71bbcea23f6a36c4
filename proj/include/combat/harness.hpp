#pragma once

// Experiment orchestration: the batched game loop, replicate fan-out,
// aggregation, CSV output, scaling-exponent fits and figure presets.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "combat/adversaries.hpp"
#include "combat/core_model.hpp"
#include "combat/policy.hpp"
#include "combat/semibandit_policies.hpp"

namespace combat {

enum class ScheduleKind { TheoremExp2, TheoremBroad, ExperimentBandit, ExperimentSemiBandit,
                          Theorem, Experiment, Fixed };

/// Theorem / Experiment pick the bandit or semi-bandit rule from each
/// policy's feedback type.
struct ScheduleRule {
  ScheduleKind kind = ScheduleKind::Experiment;
  std::int64_t fixed_length = 0;
};

std::string to_string(const ScheduleRule& rule);
ScheduleRule parse_schedule_rule(const std::string& text);
BatchSchedule resolve_schedule(const ScheduleRule& rule, const ProblemSpec& spec, Feedback policy_feedback);

enum class Granularity { PerRound, PerBatch };

std::string to_string(Granularity g);
Granularity parse_granularity(const std::string& text);

enum class PolicyKind { Exp2, Exp3, Broad, Hybrid, NegEntropy };

std::string to_string(PolicyKind kind);
PolicyKind parse_policy_kind(const std::string& text);
Feedback policy_feedback(PolicyKind kind);

/// A policy identifier plus optional overrides (keys: eta, gamma for
/// Exp2/Exp3; eta0, epoch_reset, threshold_rate for BROAD).
struct PolicySpec {
  PolicyKind kind = PolicyKind::Exp2;
  std::map<std::string, std::string> overrides;
};

struct ExperimentConfig {
  ProblemSpec spec;
  AdversaryConfig adversary;
  std::vector<PolicySpec> policies;
  ScheduleRule schedule;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output_path;
  Granularity granularity = Granularity::PerBatch;
  /// Feedback delivered to policies; defaults to the strongest any policy needs.
  std::optional<Feedback> feedback;

  void validate() const;
  Feedback game_feedback() const;
};

/// Builds a policy for `spec` with parameters derived from `schedule`.
std::unique_ptr<BatchedPolicy> make_policy(const PolicySpec& policy, const ProblemSpec& spec,
                                           const BatchSchedule& schedule);

struct RunRecord {
  std::uint64_t seed = 0;
  std::string policy;
  std::string adversary;
  std::int64_t t = 0;
  double cum_play_loss = 0.0;
  double cum_switch_cost = 0.0;
  double regret = 0.0;
  double switches = 0.0;
};

struct RunResult {
  std::uint64_t seed = 0;
  std::string policy;
  std::string adversary;
  std::vector<RunRecord> records;
  BatchSchedule schedule;
  double final_regret = 0.0;
  double total_switches = 0.0;
  double max_intra_batch_switches = 0.0;
  std::vector<std::pair<std::string, std::string>> metadata;
};

/// Plays one (seed, policy) cell. Each batch holds one arm for all its rounds;
/// feedback for the accumulated batch loss is delivered once at the batch end;
/// every round is recorded in the ledger. Throws std::logic_error if the
/// switch budget (total <= I * N, none inside a batch) is broken.
RunResult run_game(const ExperimentConfig& config, std::uint64_t seed, const PolicySpec& policy);
/// Same, against an already-built adversary.
RunResult run_game(const ExperimentConfig& config, std::uint64_t seed, const PolicySpec& policy,
                   Adversary& adversary);

/// All (policy x seed) cells, policy-major, seed-minor. Cells run on up to
/// `threads` workers; output does not depend on the thread count.
std::vector<RunResult> run_experiment(const ExperimentConfig& config, unsigned threads = 1);

/// Largest |regret - recomputed regret| over `records`, recomputing the
/// comparator from the adversary's loss sequence.
double regret_consistency_error(const std::vector<RunRecord>& records, Adversary& adversary, int I);

struct AggregatePoint {
  std::int64_t t = 0;
  double mean = 0.0;
  double se = 0.0;
  std::size_t count = 0;
};

/// Pointwise mean and standard error (sample sd / sqrt(n)) of regret across
/// replicate runs recorded on the same grid. Throws on ragged input.
std::vector<AggregatePoint> aggregate(const std::vector<std::vector<RunRecord>>& runs);

struct ScalingFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least squares of ln(y) on ln(x); needs >= 3 points, all positive.
ScalingFit fit_scaling_exponent(const std::vector<std::pair<double, double>>& sweep);

void write_records_csv(std::ostream& out, const std::vector<RunResult>& runs);
void write_aggregate_csv(std::ostream& out, const std::string& policy,
                         const std::vector<AggregatePoint>& points, bool header = true);

enum class SweepVariable { I, Lambda, K, T };

std::string to_string(SweepVariable v);
SweepVariable parse_sweep_variable(const std::string& text);

struct SweepPoint {
  double x = 0.0;
  double mean_final_regret = 0.0;
  double se = 0.0;
};

struct SweepResult {
  std::string policy;
  SweepVariable variable = SweepVariable::I;
  std::vector<SweepPoint> points;
  ScalingFit fit;
};

/// Runs `base` once per value of `variable` and fits the final-regret exponent
/// for each policy in `base`.
std::vector<SweepResult> run_sweep(const ExperimentConfig& base, SweepVariable variable,
                                   const std::vector<double>& values, unsigned threads = 1);

ExperimentConfig with_variable(ExperimentConfig config, SweepVariable variable, double value);

struct FigurePreset {
  std::string name;
  std::string description;
  ExperimentConfig config;
  std::optional<SweepVariable> sweep;
  std::vector<double> sweep_values;
};

/// fig5a ... fig5f (bandit feedback) and fig6a ... fig6f (semi-bandit).
FigurePreset figure_preset(const std::string& name);
std::vector<std::string> figure_names();

/// Seed lists like "0..19", "1,2,5" or "0..3,10".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);
std::vector<double> parse_value_list(const std::string& text);

/// Reads the flat INI-style configuration file (see README for the schema).
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text);

/// Fixed 12-significant-digit formatting used in CSV output.
std::string format_number(double v);

}  // namespace combat
