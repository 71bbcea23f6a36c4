#pragma once

// Reference solvers used only by tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace oracle {

struct Separable {
  std::function<double(int, double)> value;  // f_i(a_i)
  std::function<double(int, double)> grad;
  std::function<double(int, double)> hess;
};

inline double total(const Separable& f, const std::vector<double>& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += f.value(static_cast<int>(i), a[i]);
  return s;
}

// Diagonally scaled projected gradient on {0 < a <= 1, sum a = I}. Each step
// solves the quadratic model in the H-metric exactly (bisection on the sum
// multiplier), stays inside a trust box a/20 <= a' <= a + 0.95(1 - a), then
// backtracks.
inline std::vector<double> minimize_on_capped_simplex(const Separable& f, std::vector<double> a, int I,
                                                      double tol = 1e-10, int max_iter = 500) {
  const std::size_t K = a.size();
  std::vector<double> g(K), h(K), lo(K), hi(K), cand(K), trial(K);
  for (int it = 0; it < max_iter; ++it) {
    for (std::size_t i = 0; i < K; ++i) {
      g[i] = f.grad(static_cast<int>(i), a[i]);
      h[i] = f.hess(static_cast<int>(i), a[i]);
      lo[i] = a[i] / 20.0;
      hi[i] = a[i] + 0.95 * (1.0 - a[i]);
    }
    auto fill = [&](double nu) {
      double s = 0.0;
      for (std::size_t i = 0; i < K; ++i) {
        cand[i] = std::clamp(a[i] - (g[i] + nu) / h[i], lo[i], hi[i]);
        s += cand[i];
      }
      return s;
    };
    double nlo = -1.0, nhi = 1.0;
    while (fill(nlo) < I) nlo *= 2.0;
    while (fill(nhi) > I) nhi *= 2.0;
    for (int b = 0; b < 300; ++b) {
      const double mid = 0.5 * (nlo + nhi);
      if (mid == nlo || mid == nhi) break;
      if (fill(mid) > I) nlo = mid; else nhi = mid;
    }
    fill(0.5 * (nlo + nhi));
    // restore the exact sum on free coordinates
    double s = std::accumulate(cand.begin(), cand.end(), 0.0);
    for (std::size_t i = 0; i < K && std::abs(s - I) > 0; ++i) {
      if (cand[i] > lo[i] && cand[i] < hi[i]) {
        const double nv = std::clamp(cand[i] + (I - s), lo[i], hi[i]);
        s += nv - cand[i];
        cand[i] = nv;
      }
    }
    double slope = 0.0, step = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
      slope += g[i] * (cand[i] - a[i]);
      step = std::max(step, std::abs(cand[i] - a[i]));
    }
    if (step < tol * 1e-3) break;
    const double f0 = total(f, a);
    double t = 1.0;
    while (true) {
      for (std::size_t i = 0; i < K; ++i) trial[i] = a[i] + t * (cand[i] - a[i]);
      if (total(f, trial) <= f0 + 1e-4 * t * slope || t < 1e-12) break;
      t *= 0.5;
    }
    a = trial;
    if (t * step < tol * 1e-3) break;
  }
  return a;
}

// argmin <a, l> + (1/eta) sum (-ln a_i + ln a'_i + (a_i - a'_i)/a'_i)
inline std::vector<double> barrier_step(const std::vector<double>& a_prime, const std::vector<double>& l,
                                        double eta, int I) {
  Separable f;
  f.value = [&](int i, double x) {
    return l[static_cast<std::size_t>(i)] * x + (-std::log(x) + x / a_prime[static_cast<std::size_t>(i)]) / eta;
  };
  f.grad = [&](int i, double x) {
    return l[static_cast<std::size_t>(i)] + (-1.0 / x + 1.0 / a_prime[static_cast<std::size_t>(i)]) / eta;
  };
  f.hess = [&](int, double x) { return 1.0 / (eta * x * x); };
  std::vector<double> start(a_prime.size(), static_cast<double>(I) / static_cast<double>(a_prime.size()));
  return minimize_on_capped_simplex(f, start, I);
}

}  // namespace oracle
