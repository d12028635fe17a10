#ifndef SIGEFF_H
#define SIGEFF_H

/* C interface to the signal-detection efficiency library.
 *
 * Every function returns a status code; results come back through out
 * pointers. On failure the out values are left untouched and a per-thread
 * error message (and optional numeric detail) becomes available through
 * sigeff_last_error / sigeff_last_error_detail until the next call on the
 * same thread. All functions are thread-safe as long as each detector
 * handle is used by one thread at a time.
 */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
  SIGEFF_OK = 0,
  SIGEFF_ERR_DOMAIN = 1,              /* invalid argument or model */
  SIGEFF_ERR_NUMERIC = 2,             /* non-finite intermediate value */
  SIGEFF_ERR_NO_DERIVATIVE = 3,       /* H1 mean flat to probed order */
  SIGEFF_ERR_INCOMPARABLE_ORDERS = 4, /* detector derivative orders differ */
  SIGEFF_ERR_NMAX_EXCEEDED = 5,       /* sample-size search hit its cap */
  SIGEFF_ERR_IO = 6,                  /* file or parse failure */
  SIGEFF_ERR_INTERNAL = 7             /* unexpected exception */
};

/* Library version, e.g. "0.1.0". */
const char* sigeff_version(void);

/* Stable lowercase name for a status code ("ok", "domain", ...). */
const char* sigeff_status_name(int status);

/* Message / numeric payload of the most recent failure on this thread.
 * The message is empty and the detail NaN after a successful call. The
 * detail carries the attained P_D for SIGEFF_ERR_NMAX_EXCEEDED and the
 * failing abscissa for SIGEFF_ERR_NUMERIC when one is known. */
const char* sigeff_last_error(void);
double sigeff_last_error_detail(void);

/* Observation model: H0 samples are N(mu0, sigma0_sq); under H1 an
 * independent N(mu1, sigma1_sq) amplitude is added per sample. */
typedef struct sigeff_model {
  double mu0;
  double sigma0_sq;
  double mu1;
  double sigma1_sq;
} sigeff_model;

/* Opaque detector handle; create from a built-in name ("np", "energy",
 * "linear") and destroy when done. */
typedef struct sigeff_detector sigeff_detector;

int sigeff_detector_create(const char* name, sigeff_detector** out);
void sigeff_detector_destroy(sigeff_detector* detector);
const char* sigeff_detector_name(const sigeff_detector* detector);

/* ---- model and statistic ---- */

/* delta = 2 (sigma1_sq mu0 + sigma0_sq mu1) / sigma1_sq. */
int sigeff_delta(const sigeff_model* model, double* out);

/* Detector statistic evaluated on n samples. */
int sigeff_statistic(const sigeff_detector* detector,
                     const sigeff_model* model, const double* samples,
                     int64_t n, double* out);

/* Deterministic batch draw into a caller buffer of n doubles;
 * hypothesis 0 draws from H0, anything else from H1. */
int sigeff_sample(const sigeff_model* model, int hypothesis, int64_t n,
                  uint64_t seed, double* out_samples);

/* ---- closed-form performance ---- */

/* Threshold gamma' with false-alarm probability alpha for the quadratic
 * statistic; the _general variant admits nonzero mu0. */
int sigeff_threshold_for_pf(const sigeff_model* model, int64_t n,
                            double alpha, double* out);
int sigeff_threshold_for_pf_general(const sigeff_model* model, int64_t n,
                                    double alpha, double* out);

/* False-alarm probability of the quadratic statistic at gamma'. */
int sigeff_pf_at_threshold(const sigeff_model* model, int64_t n,
                           double gamma_prime, double* out);

/* Raw-scale threshold (compare the statistic directly against it) and its
 * inverse, valid for any built-in detector. */
int sigeff_raw_threshold_for_pf(const sigeff_detector* detector,
                                const sigeff_model* model, int64_t n,
                                double alpha, double* out);
int sigeff_pf_at_raw_threshold(const sigeff_detector* detector,
                               const sigeff_model* model, int64_t n,
                               double threshold, double* out);

/* P_D of a level-alpha test for normal H0/H1 laws with the given means and
 * standard deviations. */
int sigeff_pd_generic(double mu_h0, double mu_h1, double sigma_h0,
                      double sigma_h1, double alpha, double* out);

/* P_D of a detector from its own moment maps at level alpha. */
int sigeff_pd_closed_form(const sigeff_model* model,
                          const sigeff_detector* detector, int64_t n,
                          double alpha, double* out);

/* Standardization constants of the scaled statistic (T/sigma0^2 under H0,
 * T/(sigma0^2+sigma1^2) under H1) for general mu0, and the P_D built on
 * them. */
typedef struct sigeff_general_moments {
  double h0_mean;
  double h0_var;
  double h1_mean;
  double h1_var;
} sigeff_general_moments;

int sigeff_general_mu0_moments(const sigeff_model* model, int64_t n,
                               sigeff_general_moments* out);
int sigeff_pd_np_general(const sigeff_model* model, int64_t n, double alpha,
                         double* out);

/* ---- efficacy, ARE, relative efficiency ---- */

typedef struct sigeff_efficacy_report {
  int32_t nu;         /* smallest order with nonzero derivative at s = 0 */
  double derivative;  /* d^nu mean_h1/ds^nu at s = 0, divided by N */
  double sqrt_efficacy;
  int64_t n_used;
} sigeff_efficacy_report;

int sigeff_efficacy(const sigeff_detector* detector,
                    const sigeff_model* model, int64_t n,
                    sigeff_efficacy_report* out);

/* Asymptotic relative efficiency xi_A / xi_B (equal orders required). */
int sigeff_are(const sigeff_detector* det_a, const sigeff_detector* det_b,
               const sigeff_model* model, int64_t n, double* out);

/* Smallest N <= n_max with closed-form P_D >= beta at level alpha, plus a
 * continuous-N companion for smooth curves. */
int sigeff_required_sample_size(const sigeff_detector* detector,
                                const sigeff_model* model, double alpha,
                                double beta, int64_t n_max, int64_t* out);
int sigeff_required_sample_size_real(const sigeff_detector* detector,
                                     const sigeff_model* model, double alpha,
                                     double beta, int64_t n_max, double* out);

/* RE_{A,B} = N_B / N_A at the shared operating point (alpha, beta). */
typedef struct sigeff_re_report {
  int64_t n_a;
  int64_t n_b;
  double re;
} sigeff_re_report;

int sigeff_relative_efficiency(const sigeff_detector* det_a,
                               const sigeff_detector* det_b,
                               const sigeff_model* model, double alpha,
                               double beta, int64_t n_max,
                               sigeff_re_report* out);

/* Taylor remainder of the H1 mean beyond its order-nu term at signal s. */
int sigeff_taylor_remainder(const sigeff_detector* detector,
                            const sigeff_model* model, int64_t n, double s,
                            int32_t nu, double* out);

/* Finite-sample correction U of the RE<->ARE bridge, with its quantile and
 * remainder brackets reported separately. */
typedef struct sigeff_u_report {
  double u;
  double quantile_part;
  double remainder_part;
} sigeff_u_report;

int sigeff_u_term(const sigeff_detector* det_a, const sigeff_detector* det_b,
                  const sigeff_model* model_a, const sigeff_model* model_b,
                  int64_t n_a, int64_t n_b, double alpha, double s,
                  int32_t nu, sigeff_u_report* out);

/* Bridge right-hand side: variance_ratio * are / (1 - u)^2. */
int sigeff_re_are_rhs(double variance_ratio, double are, double u,
                      double* out);

/* ---- convergence sweeps ---- */

/* Signal schedule: at grid point N, mu1 = c_mu * N^mu_exponent and
 * sigma1^2 = c_var * N^(-var_exponent). A NaN mu_exponent selects the
 * Pitman rate -1/(2 nu) once nu is known. */
typedef struct sigeff_schedule {
  double sigma0_sq;
  double c_mu;
  double mu_exponent;
  double c_var;
  double var_exponent;
} sigeff_schedule;

sigeff_schedule sigeff_schedule_default(void);

typedef struct sigeff_convergence_record {
  double n_a;
  double n_b;
  double mu1;
  double sigma1_sq;
  double re;
  double are;
  double u;
  double rhs;
  double relative_gap;
  int32_t ok; /* 0 when the size search failed at this grid point */
} sigeff_convergence_record;

/* Writes exactly grid_len records into out_records (caller-allocated). */
int sigeff_convergence_sweep(const sigeff_detector* det_a,
                             const sigeff_detector* det_b,
                             const sigeff_schedule* schedule, double alpha,
                             double beta, const int64_t* n_grid,
                             int64_t grid_len,
                             sigeff_convergence_record* out_records);

/* CSV serialization of sweep records (fixed header, 17-significant-digit
 * fields, bit-exact round trip). The reader allocates *out_records; release
 * it with sigeff_records_free. */
int sigeff_write_convergence_csv(const sigeff_convergence_record* records,
                                 int64_t count, const char* path);
int sigeff_read_convergence_csv(const char* path,
                                sigeff_convergence_record** out_records,
                                int64_t* out_count);
void sigeff_records_free(sigeff_convergence_record* records);

/* ---- Monte Carlo oracle ---- */

typedef struct sigeff_mc_config {
  int64_t trials;   /* >= 100 */
  uint64_t seed;
  int64_t batch_size; /* in [1, trials]; tiling only */
} sigeff_mc_config;

sigeff_mc_config sigeff_mc_config_default(void);

typedef struct sigeff_mc_estimate {
  double estimate;
  double std_error;
  double ci_low;  /* 99% normal-approximation interval */
  double ci_high;
  int64_t trials;
} sigeff_mc_estimate;

/* Empirical exceedance rates of the detector statistic against a raw-scale
 * threshold under H0 (out_pf) and H1 (out_pd). */
int sigeff_empirical_pf_pd(const sigeff_model* model,
                           const sigeff_detector* detector, int64_t n,
                           double threshold, const sigeff_mc_config* cfg,
                           sigeff_mc_estimate* out_pf,
                           sigeff_mc_estimate* out_pd);

/* Simulation analogue of sigeff_required_sample_size. */
int sigeff_empirical_required_n(const sigeff_detector* detector,
                                const sigeff_model* model, double alpha,
                                double beta, const sigeff_mc_config* cfg,
                                int64_t n_max, int64_t* out);

/* Moment / distribution audit of the scaled statistic under both
 * hypotheses against the general-mu0 standardization constants. */
typedef struct sigeff_moment_audit {
  double sample_mean;
  double sample_var;
  double formula_mean;
  double formula_var;
  double mean_gap_sds;
  double var_gap_rel;
  double mean_std_error;
  double var_std_error;
  double max_cdf_gap;
} sigeff_moment_audit;

typedef struct sigeff_audit {
  sigeff_moment_audit h0;
  sigeff_moment_audit h1;
  int64_t trials;
} sigeff_audit;

int sigeff_approximation_audit(const sigeff_model* model, int64_t n,
                               const sigeff_mc_config* cfg,
                               sigeff_audit* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SIGEFF_H */
