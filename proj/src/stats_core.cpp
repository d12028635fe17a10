#include "stats_core.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace sigeff {

namespace {

constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;

void require_finite(double x, const char* name) {
  if (!std::isfinite(x)) {
    throw Error::domain(std::string(name) + " must be finite");
  }
}

// ALGORITHM AS241, APPL. STATIST. (1988) VOL. 37, NO. 3: rational
// approximations to the normal deviate for a given lower tail area. This is
// the double-precision coefficient set (PPND16), accurate to about 1e-16
// relative, so no iterative polish is needed; the round-trip test pins the
// |cdf(quantile(p)) - p| <= 1e-10 contract against an integration oracle.
double as241_quantile(double p) {
  constexpr double split1 = 0.425;
  constexpr double split2 = 5.0;
  constexpr double const1 = 0.180625;
  constexpr double const2 = 1.6;

  const double q = p - 0.5;
  if (std::fabs(q) <= split1) {
    const double r = const1 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }

  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= split2) {
    r -= const2;
    x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
            3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
          4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
          2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= split2;
    x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
          5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -x : x;
}

}  // namespace

double normal_cdf(double x) {
  require_finite(x, "normal_cdf argument");
  // The erfc form keeps full relative accuracy in the lower tail; the upper
  // tail saturates to 1 in double precision, which is the correct limit.
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double q_function(double x) {
  require_finite(x, "q_function argument");
  return 0.5 * std::erfc(x * kInvSqrt2);
}

double normal_quantile(double p) {
  if (!std::isfinite(p) || p <= 0.0 || p >= 1.0) {
    throw Error::domain("normal_quantile requires p in (0, 1)");
  }
  return as241_quantile(p);
}

NormalApprox noncentral_chi2_normal_approx(std::int64_t dof, double lambda) {
  if (dof <= 0) {
    throw Error::domain("noncentral_chi2_normal_approx requires dof >= 1");
  }
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw Error::domain(
        "noncentral_chi2_normal_approx requires finite lambda >= 0");
  }
  const double k = static_cast<double>(dof);
  return {k + lambda, 2.0 * (k + 2.0 * lambda)};
}

namespace {

double checked_eval(const std::function<double(double)>& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    throw Error::numeric("derivative_at: f is non-finite at x = " +
                             std::to_string(x),
                         x);
  }
  return v;
}

// Central difference quotients with O(h^2) leading error for every order,
// so one Richardson ladder in h^2 serves all of them.
double central_difference(const std::function<double(double)>& f, double x0,
                          int order, double h) {
  auto e = [&](double dx) { return checked_eval(f, x0 + dx); };
  switch (order) {
    case 1:
      return (e(h) - e(-h)) / (2.0 * h);
    case 2:
      return (e(h) - 2.0 * e(0.0) + e(-h)) / (h * h);
    case 3:
      return (e(2.0 * h) - 2.0 * e(h) + 2.0 * e(-h) - e(-2.0 * h)) /
             (2.0 * h * h * h);
    case 4:
      return (e(2.0 * h) - 4.0 * e(h) + 6.0 * e(0.0) - 4.0 * e(-h) +
              e(-2.0 * h)) /
             (h * h * h * h);
    default:
      throw Error::domain("derivative order must be between 1 and 4");
  }
}

void validate_diff_config(const DiffConfig& cfg) {
  if (!(cfg.base_step > 0.0) || !std::isfinite(cfg.base_step)) {
    throw Error::domain("DiffConfig.base_step must be positive and finite");
  }
  if (cfg.richardson_levels < 1 || cfg.richardson_levels > 8) {
    throw Error::domain("DiffConfig.richardson_levels must be in [1, 8]");
  }
  if (!(cfg.zero_tolerance > 0.0) || !std::isfinite(cfg.zero_tolerance)) {
    throw Error::domain("DiffConfig.zero_tolerance must be positive");
  }
}

}  // namespace

double derivative_at(const std::function<double(double)>& f, double x0,
                     int order, const DiffConfig& cfg) {
  if (!f) throw Error::domain("derivative_at requires a callable f");
  require_finite(x0, "derivative_at x0");
  if (order < 1 || order > 4) {
    throw Error::domain("derivative order must be between 1 and 4");
  }
  validate_diff_config(cfg);

  // For orders 3 and 4 the quotient divides by h^3 / h^4, so the step must
  // be wider or cancellation noise (eps / h^order) swamps the estimate.
  static constexpr std::array<double, 5> step_boost = {0.0, 1.0, 1.0, 30.0,
                                                       100.0};
  const double h0 =
      cfg.base_step * std::max(1.0, std::fabs(x0)) * step_boost[order];

  // Richardson / Neville ladder in h^2, widening the step upward from the
  // base. Halving below the base step would push the quotient into the
  // eps / h^order cancellation regime; doubling keeps every evaluation at or
  // above the base step while the extrapolation still cancels the h^2 series.
  const int levels = cfg.richardson_levels;
  std::array<double, 8> row{};
  for (int k = 0; k < levels; ++k) {
    double estimate = central_difference(f, x0, order, h0 * double(1 << k));
    double pow4 = 1.0;
    for (int j = 0; j < k; ++j) {
      pow4 *= 4.0;
      // The finer estimate is the previously stored one, so it carries the
      // 4^j weight.
      const double refined = (pow4 * row[j] - estimate) / (pow4 - 1.0);
      row[j] = estimate;
      estimate = refined;
    }
    row[k] = estimate;
  }
  return row[levels - 1];
}

DerivativeOrder smallest_nonzero_derivative_order(
    const std::function<double(double)>& f, double x0, int max_order,
    const DiffConfig& cfg) {
  if (!f) throw Error::domain("order detection requires a callable f");
  if (max_order < 1 || max_order > 4) {
    throw Error::domain("max_order must be between 1 and 4");
  }
  validate_diff_config(cfg);

  const double scale = std::max(1.0, std::fabs(checked_eval(f, x0)));
  for (int order = 1; order <= max_order; ++order) {
    const double value = derivative_at(f, x0, order, cfg);
    if (std::fabs(value) > cfg.zero_tolerance * scale) {
      return {order, value};
    }
  }
  throw Error(ErrorCode::no_nonzero_derivative,
              "no nonzero derivative of order <= " + std::to_string(max_order) +
                  " at x0 = " + std::to_string(x0));
}

}  // namespace sigeff
