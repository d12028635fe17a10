#pragma once

#include <cstdint>
#include <functional>

#include "error.hpp"

namespace sigeff {

// Settings for the central-difference derivative machinery. base_step is
// relative: the step actually used is base_step * max(1, |x0|), widened for
// derivative orders 3 and 4 where the difference quotient would otherwise
// drown in rounding noise. zero_tolerance decides when a derivative estimate
// counts as zero during order detection (scaled by max(1, |f(x0)|)).
struct DiffConfig {
  double base_step = 1e-3;
  int richardson_levels = 3;
  double zero_tolerance = 1e-7;
};

// Standard normal CDF Phi(x). Accurate in both tails (erfc-based).
double normal_cdf(double x);

// Standard normal density.
double normal_pdf(double x);

// Upper-tail probability Q(x) = 1 - Phi(x), relatively accurate for large x.
double q_function(double x);

// Inverse of normal_cdf on (0, 1). AS241 initial guess plus two Newton
// refinements against the tail-accurate CDF, so the round trip
// normal_cdf(normal_quantile(p)) reproduces p to better than 1e-10.
double normal_quantile(double p);

struct NormalApprox {
  double mean;
  double variance;
};

// Moment-matched normal limit of a noncentral chi-square with `dof` degrees
// of freedom and noncentrality `lambda`: mean dof + lambda, variance
// 2 (dof + 2 lambda).
NormalApprox noncentral_chi2_normal_approx(std::int64_t dof, double lambda);

// Order-th derivative (1..4) of f at x0 by central differences with
// Richardson extrapolation in h^2 over steps widening upward from the base.
// With the default three levels this is exact up to rounding for polynomials
// through degree order + 5. Non-finite evaluations raise a numeric Error
// carrying the offending abscissa.
double derivative_at(const std::function<double(double)>& f, double x0,
                     int order, const DiffConfig& cfg = {});

struct DerivativeOrder {
  int nu;        // smallest order with a nonzero derivative
  double value;  // that derivative's estimate
};

// Probes orders 1..max_order (max_order <= 4) and returns the first whose
// estimate exceeds zero_tolerance * max(1, |f(x0)|) in magnitude. Raises
// no_nonzero_derivative if every probed order is numerically zero.
DerivativeOrder smallest_nonzero_derivative_order(
    const std::function<double(double)>& f, double x0, int max_order,
    const DiffConfig& cfg = {});

}  // namespace sigeff
