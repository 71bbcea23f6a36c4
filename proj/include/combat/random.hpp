#pragma once

// Counter-based randomness: every draw is a pure function of a key tuple, so
// values do not depend on evaluation order or memoisation strategy.

#include <cstdint>
#include <limits>

namespace combat {

/// Stream tags keep draws for different purposes independent.
enum class Stream : std::uint64_t {
  WalkShared = 1,
  WalkPerArm = 2,
  Bernoulli = 3,
  HiddenArm = 4,
  Policy = 5,
};

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t counter_hash(std::uint64_t seed, Stream stream, std::uint64_t a,
                                     std::uint64_t b = 0) {
  std::uint64_t h = mix64(seed ^ 0x243f6a8885a308d3ULL);
  h = mix64(h ^ static_cast<std::uint64_t>(stream));
  h = mix64(h ^ a);
  return mix64(h ^ (b * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL));
}

/// Maps 64 random bits to the open interval (0, 1) on a 2^-53 grid.
constexpr double bits_to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

constexpr double counter_uniform(std::uint64_t seed, Stream stream, std::uint64_t a,
                                 std::uint64_t b = 0) {
  return bits_to_open_unit(counter_hash(seed, stream, a, b));
}

/// Standard normal quantile (inverse CDF) of u in (0, 1).
double normal_quantile(double u);

inline double counter_gaussian(std::uint64_t seed, Stream stream, std::uint64_t a,
                               std::uint64_t b = 0) {
  return normal_quantile(counter_uniform(seed, stream, a, b));
}

/// Sequential generator for policy-side sampling. Output depends only on the
/// seed; uniform doubles are taken from raw bits rather than a
/// std::uniform_real_distribution to keep streams identical across
/// standard libraries.
class SplitMixRng {
 public:
  using result_type = std::uint64_t;
  explicit SplitMixRng(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }
  double uniform() { return bits_to_open_unit((*this)()); }

 private:
  std::uint64_t state_;
};

}  // namespace combat
