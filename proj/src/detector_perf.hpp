#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "signal_model.hpp"

namespace sigeff {

// A detector is its statistic plus normal-limit moment maps for the statistic
// under each hypothesis. Moment maps take a real-valued sample count so the
// continuous sample-size extension can reuse them; integer callers pass exact
// integral values.
struct DetectorSpec {
  using StatisticFn =
      std::function<double(std::span<const double>, const GaussianSignalModel&)>;
  using MomentFn = std::function<double(double, const GaussianSignalModel&)>;

  std::string name;
  StatisticFn statistic;
  MomentFn mean_h0;
  MomentFn mean_h1;
  MomentFn var_h0;
  MomentFn var_h1;
};

struct OperatingPoint {
  OperatingPoint(double alpha, double beta);
  double alpha;  // false-alarm probability
  double beta;   // target detection probability, beta > alpha
};

// Quadratic-statistic detector T(x) = sum x^2 + delta sum x for the random
// signal model. Its moment maps are the normal-limit formulas and assume
// mu0 = 0 (they reject other models); delta inside the maps follows the
// model's mu1.
DetectorSpec np_random_signal_detector();

// Comparison detectors: plain energy sum x^2 and linear sum x.
DetectorSpec energy_detector();
DetectorSpec linear_detector();

// Threshold gamma' with closed-form false-alarm probability alpha for the
// quadratic detector at mu0 = 0:
// gamma' = sigma0^2 sigma1^2 [ Qinv(alpha) sqrt(2N + N delta^2/sigma0^2) + N ].
// The statistic is compared against gamma' / sigma1^2 on the raw scale.
double threshold_for_pf(const GaussianSignalModel& model, std::int64_t n,
                        double alpha);

// General-mu0 variant built on the scaled-statistic H0 moments below;
// reduces bit-for-bit to threshold_for_pf when mu0 = 0.
double threshold_for_pf_general(const GaussianSignalModel& model,
                                std::int64_t n, double alpha);

// Closed-form false-alarm probability of the quadratic detector at a given
// gamma'; inverse of threshold_for_pf_general.
double pf_at_threshold(const GaussianSignalModel& model, std::int64_t n,
                       double gamma_prime);

// Raw-scale threshold mean_h0 + sd_h0 * Qinv(alpha) for any detector spec.
// For the quadratic detector this equals gamma' / sigma1^2 exactly.
double raw_threshold_for_pf(const DetectorSpec& detector,
                            const GaussianSignalModel& model, std::int64_t n,
                            double alpha);

// False-alarm probability of comparing the raw statistic against `threshold`,
// using the detector's H0 normal limit.
double pf_at_raw_threshold(const DetectorSpec& detector,
                           const GaussianSignalModel& model, std::int64_t n,
                           double threshold);

// Detection probability when a normal-limit statistic with H0 moments
// (t_mu0, t_sigma0^2) and H1 moments (t_mu1, t_sigma1^2) is thresholded at
// false-alarm level alpha:
// P_D = 1 - Phi( (t_sigma0/t_sigma1) Qinv(alpha) - (t_mu1 - t_mu0)/t_sigma1 ).
double pd_generic(double t_mu0, double t_mu1, double t_sigma0, double t_sigma1,
                  double alpha);

// pd_generic applied to the detector's own moment maps.
double pd_closed_form(const GaussianSignalModel& model,
                      const DetectorSpec& detector, std::int64_t n,
                      double alpha);

// Normal-limit moments of the scaled quadratic statistic for arbitrary mu0:
// under H0 the statistic is T/sigma0^2, under H1 it is
// T/(sigma0^2 + sigma1^2); the chi-square piece contributes noncentrality
// N mu^2 and the linear piece a N(N mu delta/s^2, N delta^2/s^2) term.
struct GeneralMomentsReport {
  double h0_mean;
  double h0_var;
  double h1_mean;
  double h1_var;
};

GeneralMomentsReport general_mu0_moments(const GaussianSignalModel& model,
                                         std::int64_t n);

// Detection probability of the quadratic detector under general mu0,
// obtained by feeding the raw-scale general moments through pd_generic.
// Coincides with pd_closed_form(np) when mu0 = 0.
double pd_np_general(const GaussianSignalModel& model, std::int64_t n,
                     double alpha);

}  // namespace sigeff
