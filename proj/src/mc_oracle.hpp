#pragma once

#include <cstdint>
#include <utility>

#include "detector_perf.hpp"
#include "signal_model.hpp"

namespace sigeff {

struct MCConfig {
  std::int64_t trials = 100000;  // >= 100
  std::uint64_t seed = 0x5eed5eedULL;
  std::int64_t batch_size = 8192;  // in [1, trials]; tiling only, never
                                   // visible in any estimate
};

struct MCEstimate {
  double estimate;
  double std_error;  // binomial standard error
  double ci_low;     // normal-approximation 99% interval, clamped to [0, 1]
  double ci_high;
  std::int64_t trials;
};

// Per-hypothesis audit of the scaled-statistic normal limit: simulated
// moments against the closed-form standardization constants, estimator
// standard errors for calibrated comparisons, and the Kolmogorov-Smirnov
// gap against the fitted normal.
struct MomentAudit {
  double sample_mean;
  double sample_var;
  double formula_mean;
  double formula_var;
  double mean_gap_sds;    // |sample_mean - formula_mean| / sqrt(formula_var)
  double var_gap_rel;     // |sample_var - formula_var| / formula_var
  double mean_std_error;  // sd of the sample-mean estimator
  double var_std_error;   // sd of the sample-variance estimator
  double max_cdf_gap;     // sup |empirical CDF - fitted normal CDF|
};

struct ApproximationAudit {
  MomentAudit h0;
  MomentAudit h1;
  std::int64_t trials;
};

// Fractions of H0 / H1 trials whose statistic exceeds the raw-scale
// threshold. Trial t draws its H0 sample from stream 2t and its H1 sample
// from stream 2t+1 of the counter generator, so results are deterministic
// per seed and independent of batch_size or execution order.
std::pair<MCEstimate, MCEstimate> empirical_pf_pd(
    const GaussianSignalModel& model, const DetectorSpec& detector,
    std::int64_t n, double threshold, const MCConfig& cfg);

// Simulation analogue of required_sample_size: the smallest N whose
// empirical P_D point estimate reaches beta, with the threshold taken from
// the closed-form alpha constraint at each probed N.
std::int64_t empirical_required_n(const DetectorSpec& detector,
                                  const GaussianSignalModel& model,
                                  const OperatingPoint& op_point,
                                  const MCConfig& cfg, std::int64_t n_max);

// Simulates T/sigma0^2 under H0 and T/(sigma0^2+sigma1^2) under H1 and
// audits them against the general-mu0 standardization constants.
ApproximationAudit approximation_audit(const GaussianSignalModel& model,
                                       std::int64_t n, const MCConfig& cfg);

}  // namespace sigeff
