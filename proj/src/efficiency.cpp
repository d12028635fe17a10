#include "efficiency.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "error.hpp"

namespace sigeff {

namespace {

constexpr double kFactorial[] = {1.0, 1.0, 2.0, 6.0, 24.0};
constexpr std::int64_t kSweepSearchCap = 1000000000;

GaussianSignalModel with_mu1(const GaussianSignalModel& t, double s) {
  return GaussianSignalModel(t.mu0, t.sigma0_sq, s, t.sigma1_sq);
}

double sd_h0_at_zero_signal(const DetectorSpec& detector,
                            const GaussianSignalModel& model_template,
                            double n) {
  const double v = detector.var_h0(n, with_mu1(model_template, 0.0));
  if (!(v > 0.0)) {
    throw Error::numeric("efficacy: nonpositive H0 variance at s = 0");
  }
  return std::sqrt(v);
}

double pd_at_real_n(const GaussianSignalModel& model,
                    const DetectorSpec& detector, double n, double alpha) {
  const double m0 = detector.mean_h0(n, model);
  const double m1 = detector.mean_h1(n, model);
  const double v0 = detector.var_h0(n, model);
  const double v1 = detector.var_h1(n, model);
  if (!(v0 > 0.0) || !(v1 > 0.0)) {
    throw Error::numeric("sample-size search: nonpositive variance");
  }
  return pd_generic(m0, m1, std::sqrt(v0), std::sqrt(v1), alpha);
}

void require_valid_n(std::int64_t n, const char* where) {
  if (n < 1) {
    throw Error(ErrorCode::domain,
                std::string(where) + ": sample count must be >= 1");
  }
}

}  // namespace

std::function<double(double)> h1_mean_as_function_of_s(
    const DetectorSpec& detector, const GaussianSignalModel& model_template,
    std::int64_t n) {
  require_valid_n(n, "h1_mean_as_function_of_s");
  const double nd = static_cast<double>(n);
  auto mean_h1 = detector.mean_h1;
  auto templ = model_template;
  return [mean_h1, templ, nd](double s) {
    return mean_h1(nd, with_mu1(templ, s));
  };
}

EfficacyReport efficacy(const DetectorSpec& detector,
                        const GaussianSignalModel& model_template,
                        std::int64_t n, const DiffConfig& cfg) {
  require_valid_n(n, "efficacy");
  auto sqrt_xi_at = [&](std::int64_t m) {
    auto f = h1_mean_as_function_of_s(detector, model_template, m);
    const DerivativeOrder d = smallest_nonzero_derivative_order(f, 0.0, 4, cfg);
    const double sd0 =
        sd_h0_at_zero_signal(detector, model_template, double(m));
    return std::pair<DerivativeOrder, double>(
        d, d.value / (std::sqrt(double(m)) * sd0));
  };

  const auto [d1, xi1] = sqrt_xi_at(n);
  const auto [d2, xi2] = sqrt_xi_at(2 * n);
  if (d1.nu != d2.nu) {
    throw Error::numeric(
        "efficacy: derivative order changed when doubling N (" +
        std::to_string(d1.nu) + " vs " + std::to_string(d2.nu) + ")");
  }
  if (std::abs(xi2 - xi1) > 0.01 * std::abs(xi1)) {
    throw Error::numeric(
        "efficacy: value not stable under doubling N; the large-N limit "
        "needs a dedicated treatment for this detector");
  }
  EfficacyReport r;
  r.nu = d1.nu;
  r.derivative = d1.value / static_cast<double>(n);
  r.sqrt_efficacy = xi1;
  r.n_used = n;
  return r;
}

double are(const DetectorSpec& det_a, const DetectorSpec& det_b,
           const GaussianSignalModel& model_template, std::int64_t n,
           const DiffConfig& cfg) {
  const EfficacyReport ra = efficacy(det_a, model_template, n, cfg);
  const EfficacyReport rb = efficacy(det_b, model_template, n, cfg);
  if (ra.nu != rb.nu) {
    throw Error(ErrorCode::incomparable_orders,
                "are: derivative orders differ (" + det_a.name + ": nu=" +
                    std::to_string(ra.nu) + ", " + det_b.name + ": nu=" +
                    std::to_string(rb.nu) + ")");
  }
  const double ratio = ra.sqrt_efficacy / rb.sqrt_efficacy;
  return ratio * ratio;
}

std::int64_t required_sample_size(const DetectorSpec& detector,
                                  const GaussianSignalModel& model,
                                  const OperatingPoint& op_point,
                                  std::int64_t n_max) {
  require_valid_n(n_max, "required_sample_size");
  auto pd = [&](std::int64_t n) {
    return pd_at_real_n(model, detector, double(n), op_point.alpha);
  };
  if (pd(1) >= op_point.beta) return 1;
  // Exponential bracket: pd(lo) < beta <= pd(hi).
  std::int64_t lo = 1;
  std::int64_t hi = 2;
  while (hi < n_max && pd(hi) < op_point.beta) {
    lo = hi;
    hi = hi <= n_max / 2 ? 2 * hi : n_max;
  }
  if (hi >= n_max && pd(n_max) < op_point.beta) {
    throw Error(ErrorCode::n_max_exceeded,
                "required_sample_size: target P_D unattainable within n_max",
                pd(n_max));
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (pd(mid) >= op_point.beta ? hi : lo) = mid;
  }
  return hi;
}

double required_sample_size_real(const DetectorSpec& detector,
                                 const GaussianSignalModel& model,
                                 const OperatingPoint& op_point,
                                 std::int64_t n_max) {
  require_valid_n(n_max, "required_sample_size_real");
  auto pd = [&](double n) {
    return pd_at_real_n(model, detector, n, op_point.alpha);
  };
  double lo = 1.0;
  if (pd(lo) >= op_point.beta) {
    // Push the bracket below one sample; the moment maps extend smoothly.
    while (lo > 0x1p-40 && pd(lo) >= op_point.beta) lo *= 0.5;
    if (pd(lo) >= op_point.beta) return lo;
  }
  double hi = 2.0 * lo;
  while (hi < double(n_max) && pd(hi) < op_point.beta) {
    lo = hi;
    hi = std::min(2.0 * hi, double(n_max));
  }
  if (pd(hi) < op_point.beta) {
    throw Error(ErrorCode::n_max_exceeded,
                "required_sample_size_real: target P_D unattainable within "
                "n_max",
                pd(hi));
  }
  for (int i = 0; i < 200 && (hi - lo) > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (pd(mid) >= op_point.beta ? hi : lo) = mid;
  }
  return hi;
}

REAREReport relative_efficiency(const DetectorSpec& det_a,
                                const DetectorSpec& det_b,
                                const GaussianSignalModel& model,
                                const OperatingPoint& op_point,
                                std::int64_t n_max) {
  REAREReport r;
  r.n_a = required_sample_size(det_a, model, op_point, n_max);
  r.n_b = required_sample_size(det_b, model, op_point, n_max);
  r.re = static_cast<double>(r.n_b) / static_cast<double>(r.n_a);
  r.are = std::numeric_limits<double>::quiet_NaN();
  r.u = std::numeric_limits<double>::quiet_NaN();
  r.variance_ratio = std::numeric_limits<double>::quiet_NaN();
  r.rhs = std::numeric_limits<double>::quiet_NaN();
  return r;
}

double taylor_remainder(const DetectorSpec& detector,
                        const GaussianSignalModel& model_template,
                        std::int64_t n, double s, int nu,
                        const DiffConfig& cfg) {
  if (nu < 1 || nu > 4) {
    throw Error::domain("taylor_remainder: nu must lie in {1,...,4}");
  }
  if (!std::isfinite(s)) {
    throw Error::domain("taylor_remainder: s must be finite");
  }
  auto f = h1_mean_as_function_of_s(detector, model_template, n);
  const double lead = derivative_at(f, 0.0, nu, cfg);
  return f(s) - f(0.0) - std::pow(s, nu) / kFactorial[nu] * lead;
}

UTermReport u_term(const DetectorSpec& det_a, const DetectorSpec& det_b,
                   const GaussianSignalModel& model_a,
                   const GaussianSignalModel& model_b, std::int64_t n_a,
                   std::int64_t n_b, double alpha, double s, int nu,
                   const DiffConfig& cfg) {
  require_valid_n(n_a, "u_term");
  require_valid_n(n_b, "u_term");
  if (s == 0.0 || !std::isfinite(s)) {
    throw Error::domain("u_term: s must be finite and nonzero");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error::domain("u_term: alpha must lie in (0, 1)");
  }
  const EfficacyReport eff_a = efficacy(det_a, model_a, n_a, cfg);
  const EfficacyReport eff_b = efficacy(det_b, model_b, n_b, cfg);
  if (eff_a.nu != nu || eff_b.nu != nu) {
    throw Error(ErrorCode::incomparable_orders,
                "u_term: detector derivative orders do not match nu");
  }

  auto sd_pair = [](const DetectorSpec& d, const GaussianSignalModel& m,
                    double n) {
    const double v0 = d.var_h0(n, m);
    const double v1 = d.var_h1(n, m);
    if (!(v0 > 0.0) || !(v1 > 0.0)) {
      throw Error::numeric("u_term: nonpositive variance");
    }
    return std::pair<double, double>(std::sqrt(v0), std::sqrt(v1));
  };
  const auto [sd0_a, sd1_a] = sd_pair(det_a, model_a, double(n_a));
  const auto [sd0_b, sd1_b] = sd_pair(det_b, model_b, double(n_b));
  const double ratio_a = sd0_a / sd1_a;
  const double ratio_b = sd0_b / sd1_b;

  const double delta_a = taylor_remainder(det_a, model_a, n_a, s, nu, cfg);
  const double delta_b = taylor_remainder(det_b, model_b, n_b, s, nu, cfg);

  const double lead = kFactorial[nu] / std::pow(s, nu);
  const double denom =
      eff_b.sqrt_efficacy * ratio_b * std::sqrt(double(n_b));
  if (denom == 0.0 || !std::isfinite(denom)) {
    throw Error::numeric("u_term: degenerate denominator");
  }

  UTermReport r;
  r.quantile_part =
      lead * normal_quantile(1.0 - alpha) * (ratio_b - ratio_a) / denom;
  r.remainder_part = lead * (delta_a / sd1_a - delta_b / sd1_b) / denom;
  r.u = r.quantile_part + r.remainder_part;
  return r;
}

double re_are_rhs(double variance_ratio, double are, double u) {
  if (!(variance_ratio > 0.0) || !std::isfinite(variance_ratio)) {
    throw Error::domain("re_are_rhs: variance ratio must be positive");
  }
  if (!(are > 0.0) || !std::isfinite(are)) {
    throw Error::domain("re_are_rhs: are must be positive");
  }
  if (!(u < 1.0)) {
    throw Error::domain("re_are_rhs: u must be < 1");
  }
  const double denom = (1.0 - u) * (1.0 - u);
  return variance_ratio * are / denom;
}

std::vector<ConvergenceRecord> convergence_sweep(
    const DetectorSpec& det_a, const DetectorSpec& det_b,
    const ScalingSchedule& schedule, double alpha, double beta,
    const std::vector<std::int64_t>& n_grid, const DiffConfig& cfg) {
  const OperatingPoint op(alpha, beta);  // validates 0 < alpha < beta < 1
  if (n_grid.empty()) {
    throw Error::domain("convergence_sweep: empty grid");
  }
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1 || (i > 0 && n_grid[i] <= n_grid[i - 1])) {
      throw Error::domain(
          "convergence_sweep: grid must be strictly increasing and positive");
    }
  }
  if (!(schedule.sigma0_sq > 0.0) || !(schedule.c_var > 0.0)) {
    throw Error::domain(
        "convergence_sweep: schedule variances must stay positive");
  }

  auto model_at = [&](std::int64_t n, double mu_exp) {
    const double nd = static_cast<double>(n);
    const double sigma1_sq =
        schedule.c_var * std::pow(nd, -schedule.var_exponent);
    const double mu1 = schedule.c_mu * std::pow(nd, mu_exp);
    return GaussianSignalModel(0.0, schedule.sigma0_sq, mu1, sigma1_sq);
  };

  // Resolve the common derivative order on the first grid point's model;
  // mismatch is fatal for the whole sweep, not a per-record failure.
  const GaussianSignalModel probe = model_at(n_grid.front(), 0.0);
  const EfficacyReport eff_a = efficacy(det_a, probe, n_grid.front(), cfg);
  const EfficacyReport eff_b = efficacy(det_b, probe, n_grid.front(), cfg);
  if (eff_a.nu != eff_b.nu) {
    throw Error(ErrorCode::incomparable_orders,
                "convergence_sweep: detector derivative orders differ");
  }
  const int nu = eff_a.nu;
  const double mu_exp = std::isnan(schedule.mu_exponent)
                            ? -1.0 / (2.0 * nu)
                            : schedule.mu_exponent;

  std::vector<ConvergenceRecord> records;
  records.reserve(n_grid.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::int64_t n : n_grid) {
    const GaussianSignalModel model = model_at(n, mu_exp);
    ConvergenceRecord rec;
    rec.mu1 = model.mu1;
    rec.sigma1_sq = model.sigma1_sq;
    rec.ok = false;
    rec.n_a = rec.n_b = rec.re = rec.are = rec.u = rec.rhs =
        rec.relative_gap = nan;
    try {
      const std::int64_t n_a =
          required_sample_size(det_a, model, op, kSweepSearchCap);
      const std::int64_t n_b =
          required_sample_size(det_b, model, op, kSweepSearchCap);
      rec.n_a = static_cast<double>(n_a);
      rec.n_b = static_cast<double>(n_b);
      rec.re = rec.n_b / rec.n_a;
      rec.are = are(det_a, det_b, model, n, cfg);
      rec.u = u_term(det_a, det_b, model, model, n_a, n_b, alpha, model.mu1,
                     nu, cfg)
                  .u;
      const double vr =
          (det_b.var_h1(rec.n_b, model) / det_b.var_h0(rec.n_b, model)) /
          (det_a.var_h1(rec.n_a, model) / det_a.var_h0(rec.n_a, model));
      rec.rhs = re_are_rhs(vr, rec.are, rec.u);
      rec.relative_gap = std::abs(rec.re - rec.rhs) / rec.rhs;
      rec.ok = true;
    } catch (const Error&) {
      // Leave the record marked failed; the sweep continues.
    }
    records.push_back(rec);
  }
  return records;
}

}  // namespace sigeff
