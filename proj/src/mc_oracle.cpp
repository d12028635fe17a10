#include "mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "error.hpp"
#include "stats_core.hpp"

namespace sigeff {

namespace {

void validate_config(const MCConfig& cfg) {
  if (cfg.trials < 100) {
    throw Error::domain("mc config: trials must be >= 100");
  }
  if (cfg.batch_size < 1 || cfg.batch_size > cfg.trials) {
    throw Error::domain("mc config: batch_size must lie in [1, trials]");
  }
}

void fill_trial(std::vector<double>& x, double mean, double sd,
                std::uint64_t key) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = mean + sd * rng::normal_draw(key, static_cast<std::uint64_t>(i));
  }
}

MCEstimate estimate_from_hits(std::int64_t hits, std::int64_t trials) {
  MCEstimate e;
  e.trials = trials;
  e.estimate = static_cast<double>(hits) / static_cast<double>(trials);
  e.std_error =
      std::sqrt(e.estimate * (1.0 - e.estimate) / static_cast<double>(trials));
  const double half = normal_quantile(0.995) * e.std_error;
  e.ci_low = std::max(0.0, e.estimate - half);
  e.ci_high = std::min(1.0, e.estimate + half);
  return e;
}

// Empirical P_D at sample size n with the threshold from the closed-form
// alpha constraint; streams are re-keyed per n so that neighbouring search
// probes use independent draws.
double empirical_pd_at(const DetectorSpec& detector,
                       const GaussianSignalModel& model, std::int64_t n,
                       double alpha, const MCConfig& cfg) {
  const double tau = raw_threshold_for_pf(detector, model, n, alpha);
  const std::uint64_t seed_n =
      rng::mix64(cfg.seed ^ rng::mix64(static_cast<std::uint64_t>(n)));
  const double mean = model.mu0 + model.mu1;
  const double sd = std::sqrt(model.sigma0_sq + model.sigma1_sq);
  std::vector<double> x(static_cast<std::size_t>(n));
  std::int64_t hits = 0;
  for (std::int64_t t = 0; t < cfg.trials; ++t) {
    fill_trial(x, mean, sd, rng::stream_key(seed_n, std::uint64_t(t)));
    if (detector.statistic(x, model) > tau) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(cfg.trials);
}

MomentAudit audit_one(const std::vector<double>& values, double formula_mean,
                      double formula_var) {
  const auto m = static_cast<double>(values.size());
  double s = 0.0;
  for (double v : values) s += v;
  const double mean = s / m;
  double s2 = 0.0, s4 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    s2 += d * d;
    s4 += d * d * d * d;
  }
  const double var = s2 / m;
  const double m4 = s4 / m;

  MomentAudit a;
  a.sample_mean = mean;
  a.sample_var = var;
  a.formula_mean = formula_mean;
  a.formula_var = formula_var;
  a.mean_gap_sds = std::fabs(mean - formula_mean) / std::sqrt(formula_var);
  a.var_gap_rel = std::fabs(var - formula_var) / formula_var;
  a.mean_std_error = std::sqrt(var / m);
  a.var_std_error = std::sqrt(std::max(0.0, m4 - var * var) / m);

  // One-sample Kolmogorov-Smirnov distance against the fitted normal.
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const double sd = std::sqrt(formula_var);
  double gap = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double c = normal_cdf((sorted[i] - formula_mean) / sd);
    gap = std::max(gap, std::fabs(c - double(i) / m));
    gap = std::max(gap, std::fabs(double(i + 1) / m - c));
  }
  a.max_cdf_gap = gap;
  return a;
}

}  // namespace

std::pair<MCEstimate, MCEstimate> empirical_pf_pd(
    const GaussianSignalModel& model, const DetectorSpec& detector,
    std::int64_t n, double threshold, const MCConfig& cfg) {
  validate_config(cfg);
  if (n < 1) throw Error::domain("empirical_pf_pd: n must be >= 1");
  if (std::isnan(threshold)) {
    throw Error::domain("empirical_pf_pd: threshold must not be NaN");
  }
  const double sd0 = std::sqrt(model.sigma0_sq);
  const double sd1 = std::sqrt(model.sigma0_sq + model.sigma1_sq);

  std::vector<double> x(static_cast<std::size_t>(n));
  std::int64_t hits_h0 = 0;
  std::int64_t hits_h1 = 0;
  for (std::int64_t start = 0; start < cfg.trials; start += cfg.batch_size) {
    const std::int64_t stop = std::min(cfg.trials, start + cfg.batch_size);
    for (std::int64_t t = start; t < stop; ++t) {
      fill_trial(x, model.mu0, sd0, rng::stream_key(cfg.seed, 2 * std::uint64_t(t)));
      if (detector.statistic(x, model) > threshold) ++hits_h0;
      fill_trial(x, model.mu0 + model.mu1, sd1,
                 rng::stream_key(cfg.seed, 2 * std::uint64_t(t) + 1));
      if (detector.statistic(x, model) > threshold) ++hits_h1;
    }
  }
  return {estimate_from_hits(hits_h0, cfg.trials),
          estimate_from_hits(hits_h1, cfg.trials)};
}

std::int64_t empirical_required_n(const DetectorSpec& detector,
                                  const GaussianSignalModel& model,
                                  const OperatingPoint& op_point,
                                  const MCConfig& cfg, std::int64_t n_max) {
  validate_config(cfg);
  if (n_max < 1) {
    throw Error::domain("empirical_required_n: n_max must be >= 1");
  }
  auto pd = [&](std::int64_t n) {
    return empirical_pd_at(detector, model, n, op_point.alpha, cfg);
  };
  if (pd(1) >= op_point.beta) return 1;
  std::int64_t lo = 1;
  std::int64_t hi = 2;
  while (hi < n_max && pd(hi) < op_point.beta) {
    lo = hi;
    hi = hi <= n_max / 2 ? 2 * hi : n_max;
  }
  if (hi >= n_max && pd(n_max) < op_point.beta) {
    throw Error(ErrorCode::n_max_exceeded,
                "empirical_required_n: target P_D not reached within n_max",
                pd(n_max));
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (pd(mid) >= op_point.beta ? hi : lo) = mid;
  }
  return hi;
}

ApproximationAudit approximation_audit(const GaussianSignalModel& model,
                                       std::int64_t n, const MCConfig& cfg) {
  validate_config(cfg);
  if (n < 2) throw Error::domain("approximation_audit: n must be >= 2");

  const GeneralMomentsReport f = general_mu0_moments(model, n);
  const double dl = delta(model);
  const double s0 = model.sigma0_sq;
  const double s2 = model.sigma0_sq + model.sigma1_sq;

  std::vector<double> x(static_cast<std::size_t>(n));
  std::vector<double> t0(static_cast<std::size_t>(cfg.trials));
  std::vector<double> t1(static_cast<std::size_t>(cfg.trials));
  for (std::int64_t t = 0; t < cfg.trials; ++t) {
    fill_trial(x, model.mu0, std::sqrt(s0),
               rng::stream_key(cfg.seed, 2 * std::uint64_t(t)));
    t0[std::size_t(t)] = test_statistic(x, dl) / s0;
    fill_trial(x, model.mu0 + model.mu1, std::sqrt(s2),
               rng::stream_key(cfg.seed, 2 * std::uint64_t(t) + 1));
    t1[std::size_t(t)] = test_statistic(x, dl) / s2;
  }

  ApproximationAudit audit;
  audit.h0 = audit_one(t0, f.h0_mean, f.h0_var);
  audit.h1 = audit_one(t1, f.h1_mean, f.h1_var);
  audit.trials = cfg.trials;
  return audit;
}

}  // namespace sigeff
