#include "combat/adversaries.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "combat/random.hpp"

namespace combat {

std::string to_string(AdversaryKind kind) {
  switch (kind) {
    case AdversaryKind::CIN: return "cin";
    case AdversaryKind::CDN: return "cdn";
    case AdversaryKind::SC: return "sc";
    case AdversaryKind::Replay: return "replay";
  }
  return "?";
}

AdversaryKind parse_adversary_kind(const std::string& text) {
  if (text == "cin") return AdversaryKind::CIN;
  if (text == "cdn") return AdversaryKind::CDN;
  if (text == "sc") return AdversaryKind::SC;
  if (text == "replay") return AdversaryKind::Replay;
  throw InvalidArgument("unknown adversary kind '" + text + "'");
}

std::string to_string(NoiseCalibration c) {
  return c == NoiseCalibration::Theorem ? "theorem" : "experiment";
}

NoiseCalibration parse_noise_calibration(const std::string& text) {
  if (text == "theorem") return NoiseCalibration::Theorem;
  if (text == "experiment") return NoiseCalibration::Experiment;
  throw InvalidArgument("unknown noise calibration '" + text + "'");
}

void AdversaryConfig::validate() const {
  if (kind == AdversaryKind::Replay) return;
  spec.validate();
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidArgument("adversary scale must be > 0");
  if (kind == AdversaryKind::SC) {
    if (!(alpha_check >= 0.0) || alpha_check * spec.lambda > 1.0) {
      throw InvalidArgument("SC adversary needs 0 <= alpha_check * lambda <= 1");
    }
  }
  if (chi) {
    if (chi->dimension() != spec.K || chi->size() != spec.I) {
      throw InvalidArgument("chi must be an arm with K coordinates and I ones");
    }
  }
}

namespace {

void check_noise_horizon(const ProblemSpec& spec) {
  spec.validate();
  if (spec.T < 2) throw InvalidArgument("noise adversaries need T >= 2 (log2 T > 0)");
}

void check_epsilon(const NoiseParameters& p) {
  if (!(p.epsilon < 0.5)) {
    throw InvalidArgument("epsilon = " + std::to_string(p.epsilon) +
                          " >= 1/2 saturates the losses; reduce scale or enlarge T");
  }
}

}  // namespace

NoiseParameters cin_parameters(const ProblemSpec& spec, double scale,
                               NoiseCalibration calibration) {
  check_noise_horizon(spec);
  const double log2T = std::log2(static_cast<double>(spec.T));
  const double eps = std::cbrt(spec.lambda * spec.K) /
                     std::cbrt(static_cast<double>(spec.I) * static_cast<double>(spec.T)) /
                     (9.0 * log2T);
  double sigma = 0.0;
  if (calibration == NoiseCalibration::Experiment) {
    sigma = 1.0 / (9.0 * log2T);
  } else if (eps > 0.0) {
    sigma = 1.0 / (6.0 * std::sqrt(log2T * std::log2(4.0 * spec.T * (spec.lambda + eps) / eps)));
  }
  return {scale * eps, scale * sigma};
}

NoiseParameters cdn_parameters(const ProblemSpec& spec, double scale) {
  check_noise_horizon(spec);
  const double log2T = std::log2(static_cast<double>(spec.T));
  const double eps = std::cbrt(spec.lambda * spec.K) /
                     std::cbrt(static_cast<double>(spec.I) * spec.I * static_cast<double>(spec.T)) /
                     (9.0 * log2T);
  return {scale * eps, scale / (9.0 * log2T)};
}

double clip_unit(double x) { return std::min(std::max(x, 0.0), 1.0); }

CombinatorialArm draw_hidden_arm(int K, int I, std::uint64_t seed) {
  std::vector<int> idx(static_cast<std::size_t>(K));
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates with counter-keyed draws.
  for (int j = 0; j < I; ++j) {
    const double u = counter_uniform(seed, Stream::HiddenArm, static_cast<std::uint64_t>(j));
    const int pick = j + std::min(K - j - 1, static_cast<int>(u * (K - j)));
    std::swap(idx[static_cast<std::size_t>(j)], idx[static_cast<std::size_t>(pick)]);
  }
  idx.resize(static_cast<std::size_t>(I));
  return CombinatorialArm::from_indices(K, idx);
}

void Adversary::check_round(std::int64_t t) const {
  if (t < 1 || t > horizon()) {
    throw InvalidArgument("round " + std::to_string(t) + " outside [1, " +
                          std::to_string(horizon()) + "]");
  }
}

namespace {

CombinatorialArm resolve_chi(const AdversaryConfig& c) {
  return c.chi ? *c.chi : draw_hidden_arm(c.spec.K, c.spec.I, c.seed);
}

}  // namespace

CinAdversary::CinAdversary(const AdversaryConfig& config)
    : params_((config.validate(), cin_parameters(config.spec, config.scale, config.calibration))),
      chi_(resolve_chi(config)),
      walk_(config.seed, params_.sigma, config.spec.T, 1) {
  check_epsilon(params_);
}

std::vector<double> CinAdversary::unclipped(std::int64_t t) {
  check_round(t);
  const double w = walk_.value(t);
  std::vector<double> out(static_cast<std::size_t>(dimension()));
  for (int x = 0; x < dimension(); ++x) {
    out[static_cast<std::size_t>(x)] = w + 0.5 - params_.epsilon * (chi_.contains(x) ? 1.0 : 0.0);
  }
  return out;
}

LossVector CinAdversary::loss(std::int64_t t) {
  auto v = unclipped(t);
  for (auto& x : v) x = clip_unit(x);
  return LossVector::per_round(std::move(v));
}

CdnAdversary::CdnAdversary(const AdversaryConfig& config)
    : params_((config.validate(), cdn_parameters(config.spec, config.scale))),
      chi_(resolve_chi(config)),
      walk_(config.seed, params_.sigma, config.spec.T, config.spec.K) {
  check_epsilon(params_);
}

std::vector<double> CdnAdversary::unclipped(std::int64_t t) {
  check_round(t);
  std::vector<double> out(static_cast<std::size_t>(dimension()));
  for (int x = 0; x < dimension(); ++x) {
    out[static_cast<std::size_t>(x)] =
        walk_.value(t, x) + 0.5 - params_.epsilon * (chi_.contains(x) ? 1.0 : 0.0);
  }
  return out;
}

LossVector CdnAdversary::loss(std::int64_t t) {
  auto v = unclipped(t);
  for (auto& x : v) x = clip_unit(x);
  return LossVector::per_round(std::move(v));
}

std::vector<std::int64_t> sc_phase_lengths(std::int64_t horizon) {
  std::vector<std::int64_t> lengths;
  long double power = 1.0L;
  std::int64_t covered = 0;
  while (covered < horizon) {
    power *= 1.6L;
    const auto len = stable_floor(power);
    lengths.push_back(len);
    covered += len;
  }
  return lengths;
}

ScAdversary::ScAdversary(const AdversaryConfig& config)
    : spec_(config.spec), alpha_check_(config.alpha_check), seed_(config.seed) {
  config.validate();
  std::int64_t end = 0;
  for (auto len : sc_phase_lengths(spec_.T)) {
    end += len;
    phase_ends_.push_back(end);
  }
}

int ScAdversary::phase(std::int64_t t) const {
  check_round(t);
  const auto it = std::lower_bound(phase_ends_.begin(), phase_ends_.end(), t);
  return static_cast<int>(it - phase_ends_.begin()) + 1;
}

double ScAdversary::mean(std::int64_t t, int arm) const {
  const bool odd = phase(t) % 2 == 1;
  const bool leading = arm < spec_.I;
  const double gap = alpha_check_ * spec_.lambda;
  const double m = odd ? (leading ? 1.0 - gap : 1.0) : (leading ? 0.0 : gap);
  if (!(m >= 0.0 && m <= 1.0)) throw InvalidArgument("SC mean outside [0, 1]");
  return m;
}

LossVector ScAdversary::loss(std::int64_t t) {
  std::vector<double> v(static_cast<std::size_t>(spec_.K));
  for (int i = 0; i < spec_.K; ++i) {
    const double u = counter_uniform(seed_, Stream::Bernoulli, static_cast<std::uint64_t>(t),
                                     static_cast<std::uint64_t>(i));
    v[static_cast<std::size_t>(i)] = u < mean(t, i) ? 1.0 : 0.0;
  }
  return LossVector::per_round(std::move(v));
}

ReplayAdversary::ReplayAdversary(std::vector<std::vector<double>> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw InvalidArgument("replay sequence has no rows");
  dimension_ = static_cast<int>(rows_.front().size());
  if (dimension_ == 0) throw InvalidArgument("replay row 1 is empty");
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (static_cast<int>(rows_[r].size()) != dimension_) {
      throw InvalidArgument("replay row " + std::to_string(r + 1) + " has " +
                            std::to_string(rows_[r].size()) + " values, expected " +
                            std::to_string(dimension_));
    }
    for (double v : rows_[r]) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw InvalidArgument("replay row " + std::to_string(r + 1) + " has value " +
                              std::to_string(v) + " outside [0, 1]");
      }
    }
  }
}

ReplayAdversary ReplayAdversary::parse(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      std::string field = line.substr(start, comma == std::string::npos ? std::string::npos
                                                                         : comma - start);
      const auto b = field.find_first_not_of(" \t");
      const auto e = field.find_last_not_of(" \t");
      field = b == std::string::npos ? "" : field.substr(b, e - b + 1);
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
        throw InvalidArgument("replay line " + std::to_string(lineno) + ": malformed value '" +
                              field + "'");
      }
      row.push_back(value);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return ReplayAdversary(std::move(rows));
}

ReplayAdversary ReplayAdversary::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open replay file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

LossVector ReplayAdversary::loss(std::int64_t t) {
  check_round(t);
  return LossVector::per_round(rows_[static_cast<std::size_t>(t - 1)]);
}

std::unique_ptr<Adversary> make_adversary(const AdversaryConfig& config) {
  switch (config.kind) {
    case AdversaryKind::CIN: return std::make_unique<CinAdversary>(config);
    case AdversaryKind::CDN: return std::make_unique<CdnAdversary>(config);
    case AdversaryKind::SC: return std::make_unique<ScAdversary>(config);
    case AdversaryKind::Replay: {
      auto replay = ReplayAdversary::from_file(config.replay_path);
      if (replay.dimension() != config.spec.K) {
        throw InvalidArgument("replay file has " + std::to_string(replay.dimension()) +
                              " columns but K = " + std::to_string(config.spec.K));
      }
      if (replay.horizon() < config.spec.T) {
        throw InvalidArgument("replay file has " + std::to_string(replay.horizon()) +
                              " rows but T = " + std::to_string(config.spec.T));
      }
      return std::make_unique<ReplayAdversary>(std::move(replay));
    }
  }
  throw InvalidArgument("unknown adversary kind");
}

FeedbackView extract_feedback(const CombinatorialArm& action, std::span<const double> loss,
                              Feedback mode) {
  if (static_cast<int>(loss.size()) != action.dimension()) {
    throw InvalidArgument("dimension mismatch in extract_feedback");
  }
  FeedbackView view;
  view.mode = mode;
  if (mode == Feedback::Bandit) {
    view.bandit_value = inner(action, loss);
    return view;
  }
  view.semibandit_vector.assign(loss.size(), 0.0);
  double total = 0.0;
  for (int i = 0; i < action.dimension(); ++i) {
    if (action.contains(i)) {
      view.semibandit_vector[static_cast<std::size_t>(i)] = loss[static_cast<std::size_t>(i)];
      total += loss[static_cast<std::size_t>(i)];
    }
  }
  view.bandit_value = total;
  return view;
}

}  // namespace combat
