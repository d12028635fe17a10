#pragma once

// Independent reference implementations used only by the test suite. They
// deliberately avoid the library's code paths: the CDF oracle integrates the
// density by adaptive Simpson quadrature, and the quantile oracle inverts it
// by bisection. Slow but trustworthy.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>

namespace oracle {

inline double phi(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

namespace detail {

inline double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive(double a, double b, double fa, double fm, double fb,
                       double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = phi(lm);
  const double frm = phi(rm);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive(a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive(m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace detail

// Integral of the standard normal density over [a, b], |error| <~ 1e-14.
inline double integrate_phi(double a, double b) {
  const double fa = phi(a);
  const double fb = phi(b);
  const double fm = phi(0.5 * (a + b));
  const double whole = detail::simpson(a, b, fa, fm, fb);
  return detail::adaptive(a, b, fa, fm, fb, whole, 1e-15, 60);
}

// Reference Phi(x) for |x| <= 12: 0.5 + integral of phi over [0, x].
inline double normal_cdf(double x) {
  if (x >= 0.0) return 0.5 + integrate_phi(0.0, x);
  return 0.5 - integrate_phi(x, 0.0);
}

inline double q_function(double x) {
  // Integrate the tail [x, x + 40]; beyond that the mass is below 1e-300.
  if (x < 0.0) return 1.0 - normal_cdf(x);
  return integrate_phi(x, x + 40.0);
}

// Bisection inverse of the reference CDF.
inline double normal_quantile(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (normal_cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-13 * std::max(1.0, std::fabs(lo))) break;
  }
  return 0.5 * (lo + hi);
}

// Tiny deterministic generator for randomized property tests (this is the
// splitmix64 update; good enough statistical quality for test fuzzing).
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform(double a, double b) {
    const double u = double(next_u64() >> 11) * 0x1.0p-53;
    return a + (b - a) * u;
  }
  std::int64_t uniform_int(std::int64_t a, std::int64_t b) {
    return a + std::int64_t(next_u64() % std::uint64_t(b - a + 1));
  }
};

}  // namespace oracle
