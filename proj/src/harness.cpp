#include "combat/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "combat/bandit_policies.hpp"
#include "combat/random.hpp"

namespace combat {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

double parse_double(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw InvalidArgument("field '" + field + "': expected a number, got '" + text + "'");
  }
  return v;
}

std::int64_t parse_int(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    // allow 1e4-style integers
    const double d = parse_double(t, field);
    if (d != std::floor(d) || std::abs(d) > 9e18) {
      throw InvalidArgument("field '" + field + "': expected an integer, got '" + text + "'");
    }
    return static_cast<std::int64_t>(d);
  }
  return v;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// ---- schedules -------------------------------------------------------------

std::string to_string(const ScheduleRule& rule) {
  switch (rule.kind) {
    case ScheduleKind::TheoremExp2: return "theorem_exp2";
    case ScheduleKind::TheoremBroad: return "theorem_broad";
    case ScheduleKind::ExperimentBandit: return "experiment_bandit";
    case ScheduleKind::ExperimentSemiBandit: return "experiment_semibandit";
    case ScheduleKind::Theorem: return "theorem";
    case ScheduleKind::Experiment: return "experiment";
    case ScheduleKind::Fixed: return "fixed(" + std::to_string(rule.fixed_length) + ")";
  }
  return "?";
}

ScheduleRule parse_schedule_rule(const std::string& raw) {
  const std::string text = trim(raw);
  ScheduleRule r;
  if (text == "theorem_exp2") r.kind = ScheduleKind::TheoremExp2;
  else if (text == "theorem_broad") r.kind = ScheduleKind::TheoremBroad;
  else if (text == "experiment_bandit") r.kind = ScheduleKind::ExperimentBandit;
  else if (text == "experiment_semibandit") r.kind = ScheduleKind::ExperimentSemiBandit;
  else if (text == "theorem") r.kind = ScheduleKind::Theorem;
  else if (text == "experiment") r.kind = ScheduleKind::Experiment;
  else if (text.rfind("fixed", 0) == 0) {
    std::string arg = text.substr(5);
    if (!arg.empty() && (arg.front() == '(' || arg.front() == ':')) arg = arg.substr(1);
    if (!arg.empty() && arg.back() == ')') arg.pop_back();
    r.kind = ScheduleKind::Fixed;
    r.fixed_length = parse_int(arg, "run.schedule");
    if (r.fixed_length < 1) throw InvalidArgument("field 'run.schedule': fixed batch length must be >= 1");
  } else {
    throw InvalidArgument("field 'run.schedule': unknown schedule '" + text + "'");
  }
  return r;
}

BatchSchedule resolve_schedule(const ScheduleRule& rule, const ProblemSpec& spec, Feedback fb) {
  switch (rule.kind) {
    case ScheduleKind::TheoremExp2: return batch_schedule_exp2(spec);
    case ScheduleKind::TheoremBroad: return batch_schedule_broad(spec);
    case ScheduleKind::ExperimentBandit: return batch_schedule_experiment(spec, Feedback::Bandit);
    case ScheduleKind::ExperimentSemiBandit: return batch_schedule_experiment(spec, Feedback::SemiBandit);
    case ScheduleKind::Theorem:
      return fb == Feedback::Bandit ? batch_schedule_exp2(spec) : batch_schedule_broad(spec);
    case ScheduleKind::Experiment: return batch_schedule_experiment(spec, fb);
    case ScheduleKind::Fixed: return make_schedule(spec.T, rule.fixed_length);
  }
  throw InvalidArgument("unknown schedule");
}

std::string to_string(Granularity g) { return g == Granularity::PerRound ? "round" : "batch"; }

Granularity parse_granularity(const std::string& text) {
  const std::string t = trim(text);
  if (t == "round" || t == "per_round") return Granularity::PerRound;
  if (t == "batch" || t == "per_batch") return Granularity::PerBatch;
  throw InvalidArgument("field 'run.granularity': expected round or batch, got '" + text + "'");
}

// ---- policies --------------------------------------------------------------

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Exp2: return "batched-exp2";
    case PolicyKind::Exp3: return "batched-exp3";
    case PolicyKind::Broad: return "batched-broad";
    case PolicyKind::Hybrid: return "batched-hybrid";
    case PolicyKind::NegEntropy: return "batched-negentropy";
  }
  return "?";
}

PolicyKind parse_policy_kind(const std::string& raw) {
  const std::string t = trim(raw);
  if (t == "batched-exp2" || t == "exp2") return PolicyKind::Exp2;
  if (t == "batched-exp3" || t == "exp3") return PolicyKind::Exp3;
  if (t == "batched-broad" || t == "broad") return PolicyKind::Broad;
  if (t == "batched-hybrid" || t == "hybrid") return PolicyKind::Hybrid;
  if (t == "batched-negentropy" || t == "negentropy") return PolicyKind::NegEntropy;
  throw InvalidArgument("unknown policy '" + raw + "'");
}

Feedback policy_feedback(PolicyKind kind) {
  return (kind == PolicyKind::Exp2 || kind == PolicyKind::Exp3) ? Feedback::Bandit
                                                                : Feedback::SemiBandit;
}

std::unique_ptr<BatchedPolicy> make_policy(const PolicySpec& policy, const ProblemSpec& spec,
                                           const BatchSchedule& schedule) {
  const std::string field = "policy." + to_string(policy.kind);
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    auto it = policy.overrides.find(key);
    if (it == policy.overrides.end()) return std::nullopt;
    return it->second;
  };
  auto reject_unknown = [&](std::initializer_list<const char*> allowed) {
    for (const auto& [k, v] : policy.overrides) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; })) {
        throw InvalidArgument("field '" + field + "." + k + "': unknown override");
      }
    }
  };
  switch (policy.kind) {
    case PolicyKind::Exp2:
    case PolicyKind::Exp3: {
      reject_unknown({"eta", "gamma"});
      Exp2Parameters p;
      const auto eta = get("eta");
      const auto gamma = get("gamma");
      if (!eta || !gamma) p = exp2_parameters(spec, schedule);
      if (eta) p.eta = parse_double(*eta, field + ".eta");
      if (gamma) p.gamma = parse_double(*gamma, field + ".gamma");
      if (policy.kind == PolicyKind::Exp2) return std::make_unique<Exp2Policy>(spec, p);
      return std::make_unique<Exp3Policy>(spec, p);
    }
    case PolicyKind::Broad: {
      reject_unknown({"eta0", "epoch_reset", "threshold_rate"});
      double eta0 = broad_parameters(spec, schedule);
      if (auto v = get("eta0")) eta0 = parse_double(*v, field + ".eta0");
      BroadOptions opts;
      if (auto v = get("epoch_reset")) {
        if (*v == "barrier") opts.reset = EpochReset::Barrier;
        else if (*v == "keep") opts.reset = EpochReset::KeepIterate;
        else throw InvalidArgument("field '" + field + ".epoch_reset': expected barrier or keep");
      }
      if (auto v = get("threshold_rate")) {
        if (*v == "initial") opts.threshold = ThresholdRate::Initial;
        else if (*v == "current") opts.threshold = ThresholdRate::Current;
        else throw InvalidArgument("field '" + field + ".threshold_rate': expected initial or current");
      }
      return std::make_unique<BroadPolicy>(spec, eta0, opts);
    }
    case PolicyKind::Hybrid:
      reject_unknown({});
      return std::make_unique<FtrlPolicy>(spec, Regularizer::Hybrid);
    case PolicyKind::NegEntropy:
      reject_unknown({});
      return std::make_unique<FtrlPolicy>(spec, Regularizer::NegEntropy);
  }
  throw InvalidArgument("unknown policy");
}

// ---- config ----------------------------------------------------------------

void ExperimentConfig::validate() const {
  spec.validate();
  if (seeds.empty()) throw InvalidArgument("field 'run.seeds': at least one seed is required");
  if (policies.empty()) throw InvalidArgument("field 'run.policies': at least one policy is required");
  const auto& a = adversary.spec;
  if (a.K != spec.K || a.I != spec.I || a.T != spec.T || a.lambda != spec.lambda) {
    throw InvalidArgument("field 'adversary': adversary problem does not match [problem]");
  }
  adversary.validate();
  if (feedback && *feedback == Feedback::Bandit) {
    for (const auto& p : policies) {
      if (policy_feedback(p.kind) == Feedback::SemiBandit) {
        throw InvalidArgument("field 'run.feedback': " + to_string(p.kind) +
                              " needs semi-bandit feedback but the game gives bandit feedback");
      }
    }
  }
  for (const auto& p : policies) make_policy(p, spec, resolve_schedule(schedule, spec, policy_feedback(p.kind)));
}

Feedback ExperimentConfig::game_feedback() const {
  if (feedback) return *feedback;
  for (const auto& p : policies) {
    if (policy_feedback(p.kind) == Feedback::SemiBandit) return Feedback::SemiBandit;
  }
  return Feedback::Bandit;
}

// ---- game loop -------------------------------------------------------------

namespace {

std::uint64_t policy_seed(std::uint64_t seed, PolicyKind kind) {
  return counter_hash(seed, Stream::Policy, static_cast<std::uint64_t>(kind) + 1);
}

}  // namespace

RunResult run_game(const ExperimentConfig& config, std::uint64_t seed, const PolicySpec& policy) {
  AdversaryConfig ac = config.adversary;
  ac.seed = seed;
  auto adversary = make_adversary(ac);
  return run_game(config, seed, policy, *adversary);
}

RunResult run_game(const ExperimentConfig& config, std::uint64_t seed, const PolicySpec& policy,
                   Adversary& adversary) {
  const ProblemSpec& spec = config.spec;
  spec.validate();
  const Feedback mode = config.game_feedback();
  if (mode == Feedback::Bandit && policy_feedback(policy.kind) == Feedback::SemiBandit) {
    throw InvalidArgument(to_string(policy.kind) + " needs semi-bandit feedback");
  }
  if (adversary.dimension() != spec.K || adversary.horizon() < spec.T) {
    throw InvalidArgument("adversary does not cover the configured K and T");
  }

  const BatchSchedule schedule = resolve_schedule(config.schedule, spec, policy_feedback(policy.kind));
  schedule.validate(spec.T);
  auto learner = make_policy(policy, spec, schedule);
  SplitMixRng rng(policy_seed(seed, policy.kind));

  RunResult out;
  out.seed = seed;
  out.policy = learner->id();
  out.adversary = adversary.id();
  out.schedule = schedule;

  RegretLedger ledger(spec.K);
  std::vector<double> batch_loss(static_cast<std::size_t>(spec.K));
  auto emit = [&](std::int64_t t) {
    RunRecord r;
    r.seed = seed;
    r.policy = out.policy;
    r.adversary = out.adversary;
    r.t = t;
    r.cum_play_loss = ledger.cum_play_loss();
    r.cum_switch_cost = ledger.cum_switch_cost();
    r.regret = lambda_switching_regret(ledger, spec.I);
    r.switches = ledger.switches();
    out.records.push_back(std::move(r));
  };

  std::int64_t t = 0;
  for (const std::int64_t len : schedule.lengths) {
    const CombinatorialArm arm = learner->select(rng);
    if (arm.dimension() != spec.K || arm.size() != spec.I) {
      throw std::logic_error("policy returned an arm outside the action set");
    }
    std::fill(batch_loss.begin(), batch_loss.end(), 0.0);
    for (std::int64_t k = 0; k < len; ++k) {
      ++t;
      const LossVector l = adversary.loss(t);
      const double before = ledger.switches();
      ledger.record_round(arm, l, spec.lambda);
      if (k > 0) out.max_intra_batch_switches = std::max(out.max_intra_batch_switches, ledger.switches() - before);
      for (int i = 0; i < spec.K; ++i) batch_loss[static_cast<std::size_t>(i)] += l[i];
      if (config.granularity == Granularity::PerRound) emit(t);
    }
    learner->observe(extract_feedback(arm, batch_loss, mode));
    if (config.granularity == Granularity::PerBatch) emit(t);
  }

  out.total_switches = ledger.switches();
  out.final_regret = lambda_switching_regret(ledger, spec.I);
  out.metadata = learner->metadata();
  out.metadata.emplace_back("batch_length", std::to_string(schedule.nominal_length()));
  out.metadata.emplace_back("batches", std::to_string(schedule.count()));

  const double budget = static_cast<double>(spec.I) * static_cast<double>(schedule.count());
  if (out.total_switches > budget + 1e-9 || out.max_intra_batch_switches != 0.0) {
    throw std::logic_error("switch budget violated: " + format_number(out.total_switches) +
                           " switches for budget " + format_number(budget) + ", intra-batch " +
                           format_number(out.max_intra_batch_switches));
  }
  return out;
}

std::vector<RunResult> run_experiment(const ExperimentConfig& config, unsigned threads) {
  config.validate();
  struct Cell {
    std::size_t policy;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (std::size_t p = 0; p < config.policies.size(); ++p) {
    for (auto s : config.seeds) cells.push_back({p, s});
  }
  std::vector<RunResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        results[i] = run_game(config, cells[i].seed, config.policies[cells[i].policy]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = cells.size();
        return;
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(cells.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < n; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

double regret_consistency_error(const std::vector<RunRecord>& records, Adversary& adversary, int I) {
  std::vector<double> cum(static_cast<std::size_t>(adversary.dimension()), 0.0);
  std::int64_t t = 0;
  double worst = 0.0;
  for (const auto& r : records) {
    if (r.t < t) throw InvalidArgument("records are not in round order");
    while (t < r.t) {
      ++t;
      const LossVector l = adversary.loss(t);
      for (int i = 0; i < l.dimension(); ++i) cum[static_cast<std::size_t>(i)] += l[i];
    }
    const double best = hindsight_best(cum, I).second;
    worst = std::max(worst, std::abs(r.cum_play_loss + r.cum_switch_cost - best - r.regret));
  }
  return worst;
}

// ---- aggregation -----------------------------------------------------------

std::vector<AggregatePoint> aggregate(const std::vector<std::vector<RunRecord>>& runs) {
  if (runs.empty()) throw InvalidArgument("aggregate needs at least one run");
  const std::size_t len = runs.front().size();
  for (const auto& r : runs) {
    if (r.size() != len) throw InvalidArgument("ragged records: runs have different lengths");
  }
  std::vector<AggregatePoint> out(len);
  const double n = static_cast<double>(runs.size());
  for (std::size_t k = 0; k < len; ++k) {
    const std::int64_t t = runs.front()[k].t;
    double sum = 0.0;
    for (const auto& r : runs) {
      if (r[k].t != t) throw InvalidArgument("ragged records: round indices differ");
      sum += r[k].regret;
    }
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& r : runs) ss += (r[k].regret - mean) * (r[k].regret - mean);
    out[k].t = t;
    out[k].mean = mean;
    out[k].se = runs.size() >= 2 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
    out[k].count = runs.size();
  }
  return out;
}

ScalingFit fit_scaling_exponent(const std::vector<std::pair<double, double>>& sweep) {
  if (sweep.size() < 3) throw InvalidArgument("scaling fit needs at least 3 points");
  std::vector<double> x, y;
  for (auto [a, b] : sweep) {
    if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("scaling fit needs positive x and regret values");
    x.push_back(std::log(a));
    y.push_back(std::log(b));
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("scaling fit needs at least two distinct x values");
  ScalingFit f;
  f.exponent = sxy / sxx;
  f.intercept = my - f.exponent * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.intercept + f.exponent * x[i]);
    ss_res += e * e;
  }
  f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

void write_records_csv(std::ostream& out, const std::vector<RunResult>& runs) {
  out << "seed,policy,adversary,t,cum_play_loss,cum_switch_cost,regret,switches\n";
  for (const auto& run : runs) {
    for (const auto& r : run.records) {
      out << r.seed << ',' << r.policy << ',' << r.adversary << ',' << r.t << ','
          << format_number(r.cum_play_loss) << ',' << format_number(r.cum_switch_cost) << ','
          << format_number(r.regret) << ',' << format_number(r.switches) << '\n';
    }
  }
}

void write_aggregate_csv(std::ostream& out, const std::string& policy,
                         const std::vector<AggregatePoint>& points, bool header) {
  if (header) out << "policy,t,mean_regret,se,n\n";
  for (const auto& p : points) {
    out << policy << ',' << p.t << ',' << format_number(p.mean) << ',' << format_number(p.se) << ','
        << p.count << '\n';
  }
}

// ---- sweeps ----------------------------------------------------------------

std::string to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::I: return "I";
    case SweepVariable::Lambda: return "lambda";
    case SweepVariable::K: return "K";
    case SweepVariable::T: return "T";
  }
  return "?";
}

SweepVariable parse_sweep_variable(const std::string& raw) {
  const std::string t = trim(raw);
  if (t == "I") return SweepVariable::I;
  if (t == "lambda" || t == "λ") return SweepVariable::Lambda;
  if (t == "K") return SweepVariable::K;
  if (t == "T") return SweepVariable::T;
  throw InvalidArgument("unknown sweep variable '" + raw + "' (expected I, lambda, K or T)");
}

ExperimentConfig with_variable(ExperimentConfig config, SweepVariable variable, double value) {
  auto as_int = [&](double v) {
    if (v != std::floor(v) || v < 1) throw InvalidArgument("sweep value must be a positive integer");
    return static_cast<std::int64_t>(v);
  };
  switch (variable) {
    case SweepVariable::I: config.spec.I = static_cast<int>(as_int(value)); break;
    case SweepVariable::Lambda: config.spec.lambda = value; break;
    case SweepVariable::K: config.spec.K = static_cast<int>(as_int(value)); break;
    case SweepVariable::T: config.spec.T = as_int(value); break;
  }
  config.adversary.spec = config.spec;
  if (variable == SweepVariable::I || variable == SweepVariable::K) config.adversary.chi.reset();
  return config;
}

std::vector<SweepResult> run_sweep(const ExperimentConfig& base, SweepVariable variable,
                                   const std::vector<double>& values, unsigned threads) {
  std::vector<SweepResult> out(base.policies.size());
  for (std::size_t p = 0; p < base.policies.size(); ++p) {
    out[p].policy = to_string(base.policies[p].kind);
    out[p].variable = variable;
  }
  ExperimentConfig cfg = base;
  cfg.granularity = Granularity::PerBatch;
  for (double v : values) {
    const auto runs = run_experiment(with_variable(cfg, variable, v), threads);
    const std::size_t per = base.seeds.size();
    for (std::size_t p = 0; p < base.policies.size(); ++p) {
      std::vector<double> finals;
      for (std::size_t s = 0; s < per; ++s) finals.push_back(runs[p * per + s].final_regret);
      const double n = static_cast<double>(finals.size());
      const double mean = std::accumulate(finals.begin(), finals.end(), 0.0) / n;
      double ss = 0.0;
      for (double f : finals) ss += (f - mean) * (f - mean);
      out[p].points.push_back({v, mean, finals.size() >= 2 ? std::sqrt(ss / (n - 1.0) / n) : 0.0});
    }
  }
  if (values.size() >= 3) {
    for (auto& r : out) {
      std::vector<std::pair<double, double>> pts;
      for (const auto& pt : r.points) pts.emplace_back(pt.x, pt.mean_final_regret);
      r.fit = fit_scaling_exponent(pts);
    }
  }
  return out;
}

// ---- presets ---------------------------------------------------------------

std::vector<std::string> figure_names() {
  return {"fig5a", "fig5b", "fig5c", "fig5d", "fig5e", "fig5f",
          "fig6a", "fig6b", "fig6c", "fig6d", "fig6e", "fig6f"};
}

FigurePreset figure_preset(const std::string& name) {
  const auto names = figure_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw InvalidArgument("unknown figure '" + name + "' (expected fig5a..fig5f or fig6a..fig6f)");
  }
  const bool bandit = name[3] == '5';
  const char panel = name[4];

  FigurePreset f;
  f.name = name;
  ExperimentConfig& c = f.config;
  c.spec = {10, 3, 10000, 1.0};
  c.schedule.kind = bandit ? ScheduleKind::ExperimentBandit : ScheduleKind::ExperimentSemiBandit;
  c.granularity = Granularity::PerBatch;
  c.feedback = bandit ? Feedback::Bandit : Feedback::SemiBandit;
  c.seeds.resize(20);
  std::iota(c.seeds.begin(), c.seeds.end(), 0);
  c.adversary.kind = bandit ? AdversaryKind::CIN : AdversaryKind::CDN;
  c.adversary.scale = 10.0;
  c.adversary.calibration = NoiseCalibration::Experiment;

  if (bandit) {
    c.policies = {{PolicyKind::Exp2, {}}, {PolicyKind::Exp3, {}}};
  } else {
    c.policies = {{PolicyKind::Broad, {}}, {PolicyKind::Hybrid, {}}, {PolicyKind::NegEntropy, {}}};
  }
  const double sc_alpha = bandit ? 0.01 : 0.005;
  switch (panel) {
    case 'a': break;
    case 'b': c.spec.lambda = 0.1; break;
    case 'c':
      c.adversary.kind = AdversaryKind::SC;
      c.adversary.alpha_check = sc_alpha;
      break;
    case 'd':
      c.adversary.kind = AdversaryKind::SC;
      c.adversary.alpha_check = sc_alpha;
      c.spec.lambda = 0.1;
      break;
    case 'e':
      c.spec.K = bandit ? 20 : 40;
      c.policies.resize(1);
      f.sweep = SweepVariable::I;
      f.sweep_values = {2, 3, 4, 5, 6};
      break;
    case 'f':
      c.spec.K = 30;
      c.policies.resize(1);
      f.sweep = SweepVariable::Lambda;
      f.sweep_values = {0.25, 0.5, 1, 2, 4};
      break;
  }
  c.adversary.spec = c.spec;

  std::ostringstream d;
  d << (bandit ? "bandit" : "semi-bandit") << " feedback, " << to_string(c.adversary.kind);
  if (c.adversary.kind == AdversaryKind::SC) d << "(" << c.adversary.alpha_check << ")";
  d << ", K=" << c.spec.K;
  if (f.sweep != SweepVariable::I) d << ", I=" << c.spec.I;
  if (f.sweep != SweepVariable::Lambda) d << ", lambda=" << c.spec.lambda;
  d << ", T=" << c.spec.T;
  if (f.sweep) d << ", sweep over " << to_string(*f.sweep);
  d << "; seeds 0..19";
  f.description = d.str();
  return f;
}

// ---- list parsing ----------------------------------------------------------

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& part : split(text, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      const auto v = parse_int(part, "seeds");
      if (v < 0) throw InvalidArgument("field 'seeds': seeds must be nonnegative");
      out.push_back(static_cast<std::uint64_t>(v));
      continue;
    }
    const auto lo = parse_int(part.substr(0, dots), "seeds");
    const auto hi = parse_int(part.substr(dots + 2), "seeds");
    if (lo < 0 || hi < lo) throw InvalidArgument("field 'seeds': bad range '" + part + "'");
    for (auto s = lo; s <= hi; ++s) out.push_back(static_cast<std::uint64_t>(s));
  }
  if (out.empty()) throw InvalidArgument("field 'seeds': empty seed list");
  return out;
}

std::vector<double> parse_value_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(parse_double(part, "values"));
  if (out.empty()) throw InvalidArgument("field 'values': empty value list");
  return out;
}

}  // namespace combat
