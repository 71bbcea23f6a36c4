#include "combat/tree_noise.hpp"

#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <string>

#include "combat/core_model.hpp"

namespace combat {

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw InvalidArgument("normal_quantile: u must lie in (0, 1)");
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
}

std::int64_t parent(std::int64_t t) {
  if (t < 1) throw InvalidArgument("parent: t must be >= 1, got " + std::to_string(t));
  return t - (t & -t);
}

std::vector<std::int64_t> ancestors(std::int64_t t) {
  if (t < 0) throw InvalidArgument("ancestors: t must be >= 0");
  std::vector<std::int64_t> out;
  while (t > 0) {
    t = parent(t);
    out.push_back(t);
  }
  return out;
}

TreeShape depth_and_width(std::int64_t T) {
  if (T < 1) throw InvalidArgument("depth_and_width: T must be >= 1");
  TreeShape shape;
  // cut sizes via a difference array: s contributes to every t in (rho(s), s].
  std::vector<int> diff(static_cast<std::size_t>(T) + 2, 0);
  for (std::int64_t s = 1; s <= T; ++s) {
    shape.depth = std::max(shape.depth, static_cast<int>(ancestors(s).size()));
    ++diff[static_cast<std::size_t>(parent(s) + 1)];
    --diff[static_cast<std::size_t>(s + 1)];
  }
  int running = 0;
  for (std::int64_t t = 1; t <= T; ++t) {
    running += diff[static_cast<std::size_t>(t)];
    shape.width = std::max(shape.width, running);
  }
  return shape;
}

namespace {

// Range add / global max over positions [1, n].
class MaxAddTree {
 public:
  explicit MaxAddTree(std::size_t n) : n_(n), max_(4 * n, 0), lazy_(4 * n, 0) {}
  void add(std::size_t lo, std::size_t hi, int v) { add(1, 1, n_, lo, hi, v); }
  int max_over(std::size_t lo, std::size_t hi) const { return query(1, 1, n_, lo, hi); }

 private:
  void add(std::size_t node, std::size_t l, std::size_t r, std::size_t lo, std::size_t hi,
           int v) {
    if (hi < l || r < lo) return;
    if (lo <= l && r <= hi) {
      max_[node] += v;
      lazy_[node] += v;
      return;
    }
    const std::size_t mid = (l + r) / 2;
    add(2 * node, l, mid, lo, hi, v);
    add(2 * node + 1, mid + 1, r, lo, hi, v);
    max_[node] = lazy_[node] + std::max(max_[2 * node], max_[2 * node + 1]);
  }
  int query(std::size_t node, std::size_t l, std::size_t r, std::size_t lo,
            std::size_t hi) const {
    if (hi < l || r < lo) return 0;
    if (lo <= l && r <= hi) return max_[node];
    const std::size_t mid = (l + r) / 2;
    return lazy_[node] +
           std::max(query(2 * node, l, mid, lo, hi), query(2 * node + 1, mid + 1, r, lo, hi));
  }

  std::size_t n_;
  std::vector<int> max_;
  std::vector<int> lazy_;
};

}  // namespace

std::vector<TreeShape> depth_and_width_profile(std::int64_t max_T) {
  if (max_T < 1) throw InvalidArgument("depth_and_width_profile: max_T must be >= 1");
  const auto n = static_cast<std::size_t>(max_T);
  MaxAddTree cuts(n);
  std::vector<TreeShape> out;
  out.reserve(n);
  TreeShape running;
  for (std::int64_t s = 1; s <= max_T; ++s) {
    running.depth = std::max(running.depth, static_cast<int>(ancestors(s).size()));
    cuts.add(static_cast<std::size_t>(parent(s) + 1), static_cast<std::size_t>(s), 1);
    running.width = cuts.max_over(1, static_cast<std::size_t>(s));
    out.push_back(running);
  }
  return out;
}

GaussianWalk::GaussianWalk(std::uint64_t seed, double sigma, std::int64_t horizon, int streams)
    : seed_(seed), sigma_(sigma), horizon_(horizon), streams_(streams) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidArgument("walk sigma must be >= 0");
  if (horizon < 0) throw InvalidArgument("walk horizon must be >= 0");
  if (streams < 1) throw InvalidArgument("walk needs at least one stream");
  const auto cells = static_cast<std::size_t>(horizon + 1) * static_cast<std::size_t>(streams);
  memo_.assign(cells, 0.0);
  known_.assign(cells, 0);
}

double GaussianWalk::increment(std::int64_t t, int stream) const {
  if (t < 1) return 0.0;
  const Stream tag = streams_ == 1 ? Stream::WalkShared : Stream::WalkPerArm;
  return sigma_ * counter_gaussian(seed_, tag, static_cast<std::uint64_t>(t),
                                   static_cast<std::uint64_t>(stream));
}

double GaussianWalk::value(std::int64_t t, int stream) {
  if (t < 0 || t > horizon_) {
    throw InvalidArgument("walk time " + std::to_string(t) + " outside [0, " +
                          std::to_string(horizon_) + "]");
  }
  if (stream < 0 || stream >= streams_) throw InvalidArgument("walk stream out of range");
  if (t == 0) return 0.0;
  const auto cell = static_cast<std::size_t>(stream) * static_cast<std::size_t>(horizon_ + 1) +
                    static_cast<std::size_t>(t);
  if (!known_[cell]) {
    memo_[cell] = value(parent(t), stream) + increment(t, stream);
    known_[cell] = 1;
  }
  return memo_[cell];
}

}  // namespace combat
