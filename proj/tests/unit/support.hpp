#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "m1dg/closure.hpp"

namespace m1dg::testing {

inline std::mt19937_64 make_rng(std::uint64_t seed = 20170419) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

inline Vec2 random_unit(std::mt19937_64& rng) {
  const double t = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  return {std::cos(t), std::sin(t)};
}

/// psi0 log-uniform in [1e-3, 1e1], f uniform in [0, fmax], uniform direction.
inline MomentVector random_state(std::mt19937_64& rng, double fmax = 1.0) {
  const double psi0 = std::pow(10.0, uniform(rng, -3.0, 1.0));
  const double f = uniform(rng, 0.0, fmax);
  const Vec2 d = random_unit(rng);
  return {psi0, psi0 * f * d.x, psi0 * f * d.y};
}

/// Smallest theta in [0, 1] with mean + (1 - theta)(point - mean) realizable,
/// by bisection on the exact predicate.
inline double bisection_theta(const MomentVector& mean, const MomentVector& point) {
  auto ok = [&](double th) { return is_realizable(mean + (1.0 - th) * (point - mean)); };
  if (ok(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

} // namespace m1dg::testing
