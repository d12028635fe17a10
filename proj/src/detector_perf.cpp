#include "detector_perf.hpp"

#include <cmath>
#include <numeric>

#include "error.hpp"
#include "stats_core.hpp"

namespace sigeff {

namespace {

void require_positive_n(double n, const char* where) {
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::domain,
                std::string(where) + ": sample count must be positive");
  }
}

void require_zero_mu0(const GaussianSignalModel& model, const char* where) {
  if (model.mu0 != 0.0) {
    throw Error(ErrorCode::domain,
                std::string(where) +
                    ": quadratic-detector moment maps require mu0 = 0");
  }
}

double sum_of(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0);
}

double sum_sq_of(std::span<const double> xs) {
  double acc = 0.0;
  for (double x : xs) acc += x * x;
  return acc;
}

}  // namespace

OperatingPoint::OperatingPoint(double a, double b) : alpha(a), beta(b) {
  if (!(alpha > 0.0 && alpha < 1.0) || !std::isfinite(alpha)) {
    throw Error::domain("operating point: alpha must lie in (0, 1)");
  }
  if (!(beta > alpha && beta < 1.0) || !std::isfinite(beta)) {
    throw Error::domain("operating point: beta must lie in (alpha, 1)");
  }
}

DetectorSpec np_random_signal_detector() {
  DetectorSpec d;
  d.name = "np";
  d.statistic = [](std::span<const double> xs,
                   const GaussianSignalModel& model) {
    return test_statistic(xs, delta(model));
  };
  // Normal limits of T = sum x^2 + delta sum x at mu0 = 0. Under H0 the
  // statistic is sigma0^2 times a noncentral chi-square with noncentrality
  // N delta^2 / (4 sigma0^2) shifted by -N delta^2/4; the mean shift cancels
  // and the variance picks up the delta^2 term.
  d.mean_h0 = [](double n, const GaussianSignalModel& model) {
    require_positive_n(n, "np mean_h0");
    require_zero_mu0(model, "np mean_h0");
    return n * model.sigma0_sq;
  };
  d.var_h0 = [](double n, const GaussianSignalModel& model) {
    require_positive_n(n, "np var_h0");
    require_zero_mu0(model, "np var_h0");
    const double s0 = model.sigma0_sq;
    const double dl = delta(model);
    return s0 * s0 * (2.0 * n + n * dl * dl / s0);
  };
  d.mean_h1 = [](double n, const GaussianSignalModel& model) {
    require_positive_n(n, "np mean_h1");
    require_zero_mu0(model, "np mean_h1");
    const double s2 = model.sigma0_sq + model.sigma1_sq;
    const double dl = delta(model);
    return s2 * (n + n * model.mu1 * model.mu1 + n * model.mu1 * dl / s2);
  };
  d.var_h1 = [](double n, const GaussianSignalModel& model) {
    require_positive_n(n, "np var_h1");
    require_zero_mu0(model, "np var_h1");
    const double s2 = model.sigma0_sq + model.sigma1_sq;
    const double dl = delta(model);
    return s2 * s2 *
           (2.0 * (n + 2.0 * n * model.mu1 * model.mu1) + n * dl * dl / s2);
  };
  return d;
}

DetectorSpec energy_detector() {
  DetectorSpec d;
  d.name = "energy";
  d.statistic = [](std::span<const double> xs, const GaussianSignalModel&) {
    if (xs.empty()) throw Error::domain("energy statistic: empty sample");
    return sum_sq_of(xs);
  };
  d.mean_h0 = [](double n, const GaussianSignalModel& model) {
    require_positive_n(n, "energy mean_h0");
    require_zero_mu0(model, "energy mean_h0");
    return n * model.sigma0_sq;
  };
  d.var_h0 = [](double n, const GaussianSignalModel& model) {
    require_positive_n(n, "energy var_h0");
    require_zero_mu0(model, "energy var_h0");
    return 2.0 * n * model.sigma0_sq * model.sigma0_sq;
  };
  d.mean_h1 = [](double n, const GaussianSignalModel& model) {
    require_positive_n(n, "energy mean_h1");
    require_zero_mu0(model, "energy mean_h1");
    const double s2 = model.sigma0_sq + model.sigma1_sq;
    return n * (s2 + model.mu1 * model.mu1);
  };
  d.var_h1 = [](double n, const GaussianSignalModel& model) {
    require_positive_n(n, "energy var_h1");
    require_zero_mu0(model, "energy var_h1");
    const double s2 = model.sigma0_sq + model.sigma1_sq;
    return 2.0 * n * s2 * s2 + 4.0 * n * model.mu1 * model.mu1 * s2;
  };
  return d;
}

DetectorSpec linear_detector() {
  DetectorSpec d;
  d.name = "linear";
  d.statistic = [](std::span<const double> xs, const GaussianSignalModel&) {
    if (xs.empty()) throw Error::domain("linear statistic: empty sample");
    return sum_of(xs);
  };
  // The linear statistic is exactly normal; mu0 enters the means directly so
  // no mu0 restriction applies.
  d.mean_h0 = [](double n, const GaussianSignalModel& model) {
    require_positive_n(n, "linear mean_h0");
    return n * model.mu0;
  };
  d.var_h0 = [](double n, const GaussianSignalModel& model) {
    require_positive_n(n, "linear var_h0");
    return n * model.sigma0_sq;
  };
  d.mean_h1 = [](double n, const GaussianSignalModel& model) {
    require_positive_n(n, "linear mean_h1");
    return n * (model.mu0 + model.mu1);
  };
  d.var_h1 = [](double n, const GaussianSignalModel& model) {
    require_positive_n(n, "linear var_h1");
    return n * (model.sigma0_sq + model.sigma1_sq);
  };
  return d;
}

double threshold_for_pf(const GaussianSignalModel& model, std::int64_t n,
                        double alpha) {
  require_positive_n(static_cast<double>(n), "threshold_for_pf");
  require_zero_mu0(model, "threshold_for_pf");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error::domain("threshold_for_pf: alpha must lie in (0, 1)");
  }
  const double s0 = model.sigma0_sq;
  const double s1 = model.sigma1_sq;
  const double dl = delta(model);
  const double nd = static_cast<double>(n);
  const double q = normal_quantile(1.0 - alpha);
  return s0 * s1 * (q * std::sqrt(2.0 * nd + nd * dl * dl / s0) + nd);
}

double threshold_for_pf_general(const GaussianSignalModel& model,
                                std::int64_t n, double alpha) {
  require_positive_n(static_cast<double>(n), "threshold_for_pf_general");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error::domain("threshold_for_pf_general: alpha must lie in (0, 1)");
  }
  const GeneralMomentsReport m = general_mu0_moments(model, n);
  const double q = normal_quantile(1.0 - alpha);
  // Scaled statistic T/sigma0^2 thresholded at gamma'/(sigma0^2 sigma1^2).
  return model.sigma0_sq * model.sigma1_sq *
         (q * std::sqrt(m.h0_var) + m.h0_mean);
}

double pf_at_threshold(const GaussianSignalModel& model, std::int64_t n,
                       double gamma_prime) {
  require_positive_n(static_cast<double>(n), "pf_at_threshold");
  if (!std::isfinite(gamma_prime)) {
    throw Error::domain("pf_at_threshold: threshold must be finite");
  }
  const GeneralMomentsReport m = general_mu0_moments(model, n);
  const double scaled =
      gamma_prime / (model.sigma0_sq * model.sigma1_sq);
  return q_function((scaled - m.h0_mean) / std::sqrt(m.h0_var));
}

double raw_threshold_for_pf(const DetectorSpec& detector,
                            const GaussianSignalModel& model, std::int64_t n,
                            double alpha) {
  require_positive_n(static_cast<double>(n), "raw_threshold_for_pf");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error::domain("raw_threshold_for_pf: alpha must lie in (0, 1)");
  }
  const double nd = static_cast<double>(n);
  const double mean = detector.mean_h0(nd, model);
  const double var = detector.var_h0(nd, model);
  if (!(var > 0.0)) {
    throw Error::numeric("raw_threshold_for_pf: nonpositive H0 variance");
  }
  return mean + std::sqrt(var) * normal_quantile(1.0 - alpha);
}

double pf_at_raw_threshold(const DetectorSpec& detector,
                           const GaussianSignalModel& model, std::int64_t n,
                           double threshold) {
  require_positive_n(static_cast<double>(n), "pf_at_raw_threshold");
  if (!std::isfinite(threshold)) {
    throw Error::domain("pf_at_raw_threshold: threshold must be finite");
  }
  const double nd = static_cast<double>(n);
  const double mean = detector.mean_h0(nd, model);
  const double var = detector.var_h0(nd, model);
  if (!(var > 0.0)) {
    throw Error::numeric("pf_at_raw_threshold: nonpositive H0 variance");
  }
  return q_function((threshold - mean) / std::sqrt(var));
}

double pd_generic(double t_mu0, double t_mu1, double t_sigma0, double t_sigma1,
                  double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error::domain("pd_generic: alpha must lie in (0, 1)");
  }
  if (!(t_sigma0 > 0.0) || !(t_sigma1 > 0.0) || !std::isfinite(t_mu0) ||
      !std::isfinite(t_mu1) || !std::isfinite(t_sigma0) ||
      !std::isfinite(t_sigma1)) {
    throw Error::domain("pd_generic: moments must be finite with positive sds");
  }
  const double q = normal_quantile(1.0 - alpha);
  return q_function((t_sigma0 / t_sigma1) * q - (t_mu1 - t_mu0) / t_sigma1);
}

double pd_closed_form(const GaussianSignalModel& model,
                      const DetectorSpec& detector, std::int64_t n,
                      double alpha) {
  require_positive_n(static_cast<double>(n), "pd_closed_form");
  const double nd = static_cast<double>(n);
  const double m0 = detector.mean_h0(nd, model);
  const double m1 = detector.mean_h1(nd, model);
  const double v0 = detector.var_h0(nd, model);
  const double v1 = detector.var_h1(nd, model);
  if (!(v0 > 0.0) || !(v1 > 0.0)) {
    throw Error::numeric("pd_closed_form: nonpositive variance");
  }
  return pd_generic(m0, m1, std::sqrt(v0), std::sqrt(v1), alpha);
}

GeneralMomentsReport general_mu0_moments(const GaussianSignalModel& model,
                                         std::int64_t n) {
  require_positive_n(static_cast<double>(n), "general_mu0_moments");
  const double nd = static_cast<double>(n);
  const double s0 = model.sigma0_sq;
  const double s2 = model.sigma0_sq + model.sigma1_sq;
  const double dl = delta(model);
  const double m0 = model.mu0;
  const double m1 = model.mu0 + model.mu1;
  GeneralMomentsReport r;
  r.h0_mean = nd + nd * m0 * m0 + nd * m0 * dl / s0;
  r.h0_var = 2.0 * (nd + 2.0 * nd * m0 * m0) + nd * dl * dl / s0;
  r.h1_mean = nd + nd * m1 * m1 + nd * m1 * dl / s2;
  r.h1_var = 2.0 * (nd + 2.0 * nd * m1 * m1) + nd * dl * dl / s2;
  return r;
}

double pd_np_general(const GaussianSignalModel& model, std::int64_t n,
                     double alpha) {
  require_positive_n(static_cast<double>(n), "pd_np_general");
  const GeneralMomentsReport m = general_mu0_moments(model, n);
  const double s0 = model.sigma0_sq;
  const double s2 = model.sigma0_sq + model.sigma1_sq;
  // Undo the per-hypothesis scaling so both moments live on the raw T scale.
  return pd_generic(s0 * m.h0_mean, s2 * m.h1_mean, s0 * std::sqrt(m.h0_var),
                    s2 * std::sqrt(m.h1_var), alpha);
}

}  // namespace sigeff
