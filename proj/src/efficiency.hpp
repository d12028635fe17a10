#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "detector_perf.hpp"
#include "signal_model.hpp"
#include "stats_core.hpp"

namespace sigeff {

struct EfficacyReport {
  int nu;             // smallest order with nonzero derivative at s = 0
  double derivative;  // d^nu mean_h1/ds^nu at s = 0, divided by N
  double sqrt_efficacy;
  std::int64_t n_used;
};

struct REAREReport {
  std::int64_t n_a;
  std::int64_t n_b;
  double re;
  double are;
  double u;
  double variance_ratio;
  double rhs;
};

struct UTermReport {
  double u;
  double quantile_part;   // quantile-weighted sd-ratio bracket
  double remainder_part;  // Taylor-remainder bracket
};

// Signal-mean schedule for convergence studies: at grid point N the model is
// mu1 = c_mu * N^mu_exponent, sigma1^2 = c_var * N^(-var_exponent). A NaN
// mu_exponent means "resolve to the Pitman rate -1/(2 nu)" once the common
// derivative order nu is known.
struct ScalingSchedule {
  double sigma0_sq = 1.0;
  double c_mu = 0.5;
  double mu_exponent = std::numeric_limits<double>::quiet_NaN();
  double c_var = 1.0;
  double var_exponent = 0.0;
};

struct ConvergenceRecord {
  double n_a;
  double n_b;
  double mu1;
  double sigma1_sq;
  double re;
  double are;
  double u;
  double rhs;
  double relative_gap;  // |re - rhs| / rhs
  bool ok;
};

// The detector's H1 mean as a function of the signal mean s, with delta
// recomputed as delta(s); the template supplies the variances (mu0 = 0 for
// detectors whose moment maps demand it).
std::function<double(double)> h1_mean_as_function_of_s(
    const DetectorSpec& detector, const GaussianSignalModel& model_template,
    std::int64_t n);

// sqrt(xi) = (d^nu mean_h1/ds^nu at 0) / (sqrt(N) sd_h0 at the s=0 model),
// with nu detected numerically. The value must be stable under doubling N
// (the built-ins' N factors cancel exactly).
EfficacyReport efficacy(const DetectorSpec& detector,
                        const GaussianSignalModel& model_template,
                        std::int64_t n, const DiffConfig& cfg = {});

// Asymptotic relative efficiency xi_A / xi_B; requires equal derivative
// orders.
double are(const DetectorSpec& det_a, const DetectorSpec& det_b,
           const GaussianSignalModel& model_template, std::int64_t n,
           const DiffConfig& cfg = {});

// Smallest integer N <= n_max with closed-form P_D >= beta at level alpha.
std::int64_t required_sample_size(const DetectorSpec& detector,
                                  const GaussianSignalModel& model,
                                  const OperatingPoint& op_point,
                                  std::int64_t n_max);

// Continuous-N companion of required_sample_size for smooth plots: the real
// root of pd(N) = beta found by bisection, not the paper's integer count.
double required_sample_size_real(const DetectorSpec& detector,
                                 const GaussianSignalModel& model,
                                 const OperatingPoint& op_point,
                                 std::int64_t n_max);

// RE_{A,B} = N_B / N_A at a shared operating point; fills the size and re
// fields, leaving the bridge-formula fields NaN.
REAREReport relative_efficiency(const DetectorSpec& det_a,
                                const DetectorSpec& det_b,
                                const GaussianSignalModel& model,
                                const OperatingPoint& op_point,
                                std::int64_t n_max);

// Delta(s) = mean_h1(s) - mean_h1(0) - (s^nu / nu!) d^nu mean_h1/ds^nu|_0.
double taylor_remainder(const DetectorSpec& detector,
                        const GaussianSignalModel& model_template,
                        std::int64_t n, double s, int nu,
                        const DiffConfig& cfg = {});

// The U correction of the RE<->ARE bridge, split into its two brackets:
// U = [ (nu!/s^nu) Qinv(alpha) (r_B - r_A)
//     + (nu!/s^nu) (Delta_A/sd1_A - Delta_B/sd1_B) ]
//     / (sqrt(xi_B) r_B sqrt(N_B)),   r_X = sd0_X / sd1_X.
UTermReport u_term(const DetectorSpec& det_a, const DetectorSpec& det_b,
                   const GaussianSignalModel& model_a,
                   const GaussianSignalModel& model_b, std::int64_t n_a,
                   std::int64_t n_b, double alpha, double s, int nu,
                   const DiffConfig& cfg = {});

// Right-hand side of the bridge formula: variance_ratio * are / (1 - u)^2.
double re_are_rhs(double variance_ratio, double are, double u);

// One record per grid point: model from the schedule, RE by integer search,
// ARE, U at s = mu1(N), and the bridge RHS. Search failures mark the record
// failed (NaN fields) instead of aborting the sweep.
std::vector<ConvergenceRecord> convergence_sweep(
    const DetectorSpec& det_a, const DetectorSpec& det_b,
    const ScalingSchedule& schedule, double alpha, double beta,
    const std::vector<std::int64_t>& n_grid, const DiffConfig& cfg = {});

}  // namespace sigeff
