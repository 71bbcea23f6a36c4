#include "combat/bandit_policies.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace combat {

ArmSet::ArmSet(int K, int I) : K_(K), I_(I) {
  if (I < 1 || I > K) throw InvalidArgument("ArmSet needs 1 <= I <= K");
  const double n = binomial(K, I);
  if (n > kMaxEnumeratedArms) {
    std::ostringstream msg;
    msg << "action set too large to enumerate: C(" << K << "," << I << ") = " << n
        << " > " << kMaxEnumeratedArms;
    throw InvalidArgument(msg.str());
  }
  count_ = static_cast<std::size_t>(n);
  flat_.reserve(count_ * static_cast<std::size_t>(I));
  std::vector<int> c(static_cast<std::size_t>(I));
  for (int j = 0; j < I; ++j) c[static_cast<std::size_t>(j)] = j;
  while (true) {
    for (int v : c) flat_.push_back(static_cast<std::uint16_t>(v));
    int j = I - 1;
    while (j >= 0 && c[static_cast<std::size_t>(j)] == K - I + j) --j;
    if (j < 0) break;
    ++c[static_cast<std::size_t>(j)];
    for (int k = j + 1; k < I; ++k) c[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(k - 1)] + 1;
  }
}

CombinatorialArm ArmSet::arm(std::size_t j) const {
  const auto idx = indices(j);
  std::vector<int> v(idx.begin(), idx.end());
  return CombinatorialArm::from_indices(K_, v);
}

std::size_t ArmSet::rank(const CombinatorialArm& arm) const {
  if (arm.dimension() != K_ || arm.size() != I_) throw InvalidArgument("arm not in this action set");
  const auto c = arm.indices();
  double r = 0.0;
  int prev = -1;
  for (int j = 0; j < I_; ++j) {
    for (int v = prev + 1; v < c[static_cast<std::size_t>(j)]; ++v) r += binomial(K_ - 1 - v, I_ - 1 - j);
    prev = c[static_cast<std::size_t>(j)];
  }
  return static_cast<std::size_t>(r);
}

std::vector<double> build_exploration_distribution(int K, int I) {
  const double n = binomial(K, I);
  if (I < 1 || I > K) throw InvalidArgument("exploration distribution needs 1 <= I <= K");
  if (n > kMaxEnumeratedArms) throw InvalidArgument("action set too large to enumerate");
  return std::vector<double>(static_cast<std::size_t>(n), 1.0 / n);
}

CovarianceOperator exp2_covariance(std::span<const double> p, const ArmSet& arms,
                                   double rank_tolerance) {
  if (p.size() != arms.size()) throw InvalidArgument("distribution size does not match arm set");
  const int K = arms.K();
  CovarianceOperator op;
  op.rank_tolerance = rank_tolerance;
  op.matrix = Eigen::MatrixXd::Zero(K, K);
  for (std::size_t j = 0; j < arms.size(); ++j) {
    const double w = p[j];
    if (w == 0.0) continue;
    const auto idx = arms.indices(j);
    for (auto a : idx) {
      for (auto b : idx) op.matrix(a, b) += w;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(op.matrix);
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double cutoff = rank_tolerance * std::max(values.maxCoeff(), 0.0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(K);
  for (int i = 0; i < K; ++i) {
    if (values(i) > cutoff) {
      inv(i) = 1.0 / values(i);
      ++op.rank;
    }
  }
  op.min_eigenvalue = values.minCoeff();
  op.pinv = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
  return op;
}

Exp2Parameters exp2_parameters(const ProblemSpec& spec, const BatchSchedule& schedule) {
  spec.validate();
  schedule.validate(spec.T);
  const double B = static_cast<double>(schedule.nominal_length());
  const double N = std::floor(static_cast<double>(spec.T) / B) + 1.0;
  const double log_arms = std::log(binomial(spec.K, spec.I));
  const double BI = B * spec.I;
  Exp2Parameters p;
  p.eta = std::sqrt(log_arms / (3.0 * N * spec.K * BI * BI));
  p.gamma = p.eta * BI * spec.K;
  if (!(p.gamma < 1.0)) {
    throw InvalidArgument("exploration rate gamma = " + std::to_string(p.gamma) +
                          " >= 1; use a longer horizon or a shorter batch");
  }
  return p;
}

std::size_t sample_index(std::span<const double> p, double u) {
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] <= 0.0) continue;
    acc += p[j];
    last_positive = j;
    if (u < acc) return j;
  }
  return last_positive;
}

namespace {

// q = softmax(log_weights), after shifting the maximum to zero.
void softmax_in_place(std::vector<double>& log_weights, std::vector<double>& q) {
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  double total = 0.0;
  q.resize(log_weights.size());
  for (std::size_t j = 0; j < q.size(); ++j) {
    log_weights[j] -= top;
    q[j] = std::exp(log_weights[j]);
    total += q[j];
  }
  for (auto& x : q) x /= total;
}

void check_parameters(const Exp2Parameters& p) {
  if (!(p.eta >= 0.0) || !std::isfinite(p.eta)) throw InvalidArgument("eta must be finite and >= 0");
  if (!(p.gamma >= 0.0 && p.gamma <= 1.0)) throw InvalidArgument("gamma must lie in [0, 1]");
}

}  // namespace

Exp2State::Exp2State(ArmSet arms, Exp2Parameters params, std::vector<double> mu)
    : arms_(std::move(arms)), params_(params), mu_(std::move(mu)) {
  check_parameters(params_);
  if (mu_.size() != arms_.size()) throw InvalidArgument("exploration distribution has wrong size");
  double total = 0.0;
  for (double m : mu_) {
    if (!(m >= 0.0)) throw InvalidArgument("exploration distribution has a negative entry");
    total += m;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("exploration distribution must sum to 1");
  log_weights_.assign(arms_.size(), 0.0);
  q_.assign(arms_.size(), 1.0 / static_cast<double>(arms_.size()));
}

std::vector<double> Exp2State::sampling_distribution() const {
  std::vector<double> p(q_.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    p[j] = (1.0 - params_.gamma) * q_[j] + params_.gamma * mu_[j];
  }
  return p;
}

std::size_t Exp2State::select(SplitMixRng& rng) const {
  return sample_index(sampling_distribution(), rng.uniform());
}

Eigen::VectorXd Exp2State::estimate(std::size_t played, double batch_loss_total) const {
  if (played >= arms_.size()) throw InvalidArgument("played arm index out of range");
  const auto p = sampling_distribution();
  const auto cov = exp2_covariance(p, arms_);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(arms_.K());
  for (auto i : arms_.indices(played)) a(i) = 1.0;
  Eigen::VectorXd est = batch_loss_total * (cov.pinv * a);
  if (!est.allFinite()) {
    throw std::runtime_error("Exp2 loss estimate is not finite (covariance conditioning failure)");
  }
  return est;
}

void Exp2State::update(std::size_t played, double batch_loss_total) {
  if (!(batch_loss_total >= 0.0)) throw InvalidArgument("batch loss must be >= 0");
  if (batch_loss_total > 0.0 && params_.eta > 0.0) {
    const Eigen::VectorXd est = estimate(played, batch_loss_total);
    for (std::size_t j = 0; j < arms_.size(); ++j) {
      double s = 0.0;
      for (auto i : arms_.indices(j)) s += est(i);
      log_weights_[j] -= params_.eta * s;
    }
    renormalise();
  }
  ++batch_index_;
}

void Exp2State::renormalise() { softmax_in_place(log_weights_, q_); }

Exp3State::Exp3State(std::size_t meta_arms, Exp2Parameters params) : params_(params) {
  check_parameters(params_);
  if (meta_arms == 0) throw InvalidArgument("Exp3 needs at least one meta-arm");
  log_weights_.assign(meta_arms, 0.0);
  q_.assign(meta_arms, 1.0 / static_cast<double>(meta_arms));
}

std::vector<double> Exp3State::sampling_distribution() const {
  const double uniform = 1.0 / static_cast<double>(q_.size());
  std::vector<double> p(q_.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    p[j] = (1.0 - params_.gamma) * q_[j] + params_.gamma * uniform;
  }
  return p;
}

std::size_t Exp3State::select(SplitMixRng& rng) const {
  return sample_index(sampling_distribution(), rng.uniform());
}

void Exp3State::update(std::size_t played, double batch_loss_total) {
  if (played >= q_.size()) throw InvalidArgument("played meta-arm out of range");
  if (!(batch_loss_total >= 0.0)) throw InvalidArgument("batch loss must be >= 0");
  if (batch_loss_total == 0.0 || params_.eta == 0.0) return;
  const double p_played = sampling_distribution()[played];
  if (!(p_played > 0.0)) throw InvalidArgument("played meta-arm has zero probability");
  log_weights_[played] -= params_.eta * batch_loss_total / p_played;
  softmax_in_place(log_weights_, q_);
}

namespace {

std::string fmt_double(double v) {
  std::ostringstream s;
  s.precision(12);
  s << v;
  return s.str();
}

}  // namespace

Exp2Policy::Exp2Policy(const ProblemSpec& spec, Exp2Parameters params,
                       std::optional<std::vector<double>> mu)
    : state_(ArmSet(spec.K, spec.I), params,
             mu ? std::move(*mu) : build_exploration_distribution(spec.K, spec.I)) {}

CombinatorialArm Exp2Policy::select(SplitMixRng& rng) {
  last_ = state_.select(rng);
  return state_.arms().arm(last_);
}

void Exp2Policy::observe(const FeedbackView& feedback) {
  state_.update(last_, feedback.bandit_value);
}

std::vector<std::pair<std::string, std::string>> Exp2Policy::metadata() const {
  return {{"eta", fmt_double(state_.parameters().eta)},
          {"gamma", fmt_double(state_.parameters().gamma)},
          {"exploration", "uniform-over-action-set"}};
}

Exp3Policy::Exp3Policy(const ProblemSpec& spec, Exp2Parameters params)
    : arms_(spec.K, spec.I), state_(arms_.size(), params) {}

CombinatorialArm Exp3Policy::select(SplitMixRng& rng) {
  last_ = state_.select(rng);
  return arms_.arm(last_);
}

void Exp3Policy::observe(const FeedbackView& feedback) {
  state_.update(last_, feedback.bandit_value);
}

std::vector<std::pair<std::string, std::string>> Exp3Policy::metadata() const {
  return {{"eta", fmt_double(state_.parameters().eta)},
          {"gamma", fmt_double(state_.parameters().gamma)},
          {"tuning", "exp2-theorem-parameters"}};
}

}  // namespace combat
