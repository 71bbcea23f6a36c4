#pragma once

// Parent-time tree rho(t) = t - 2^{delta(t)} and the multi-scale Gaussian
// random walks W_t = W_{rho(t)} + xi_t built on it.

#include <cstdint>
#include <utility>
#include <vector>

#include "combat/random.hpp"

namespace combat {

/// t minus the largest power of two dividing t. Throws for t < 1.
std::int64_t parent(std::int64_t t);

/// Iterated parents of t in descending order; empty for t = 0.
std::vector<std::int64_t> ancestors(std::int64_t t);

struct TreeShape {
  int depth = 0;  // max_t |S(t)|
  int width = 0;  // max_t |cut(t)|, cut(t) = {s in [T] : rho(s) < t <= s}
};

/// Exact depth and width for horizon T, O(T).
TreeShape depth_and_width(std::int64_t T);

/// depth_and_width(T) for every T in [1, max_T]; element T-1 belongs to T.
/// Incremental, O(max_T log max_T).
std::vector<TreeShape> depth_and_width_profile(std::int64_t max_T);

/// Memoised walk over `streams` independent noise sequences (1 for the
/// shared-noise walk, K for per-arm walks). xi for (t, stream) is derived
/// from (seed, t, stream) alone, so values are independent of query order.
class GaussianWalk {
 public:
  GaussianWalk(std::uint64_t seed, double sigma, std::int64_t horizon, int streams = 1);

  double value(std::int64_t t, int stream = 0);
  double increment(std::int64_t t, int stream = 0) const;

  double sigma() const { return sigma_; }
  std::int64_t horizon() const { return horizon_; }
  int streams() const { return streams_; }

 private:
  std::uint64_t seed_;
  double sigma_;
  std::int64_t horizon_;
  int streams_;
  std::vector<double> memo_;
  std::vector<std::uint8_t> known_;
};

}  // namespace combat
