#include "sigeff.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <limits>
#include <new>
#include <span>
#include <string>
#include <vector>

#include "detector_perf.hpp"
#include "efficiency.hpp"
#include "error.hpp"
#include "mc_oracle.hpp"
#include "report_io.hpp"
#include "signal_model.hpp"

struct sigeff_detector {
  sigeff::DetectorSpec spec;
};

namespace {

thread_local std::string g_last_message;
thread_local double g_last_detail = std::numeric_limits<double>::quiet_NaN();

int status_of(sigeff::ErrorCode code) {
  switch (code) {
    case sigeff::ErrorCode::domain:
      return SIGEFF_ERR_DOMAIN;
    case sigeff::ErrorCode::numeric:
      return SIGEFF_ERR_NUMERIC;
    case sigeff::ErrorCode::no_nonzero_derivative:
      return SIGEFF_ERR_NO_DERIVATIVE;
    case sigeff::ErrorCode::incomparable_orders:
      return SIGEFF_ERR_INCOMPARABLE_ORDERS;
    case sigeff::ErrorCode::n_max_exceeded:
      return SIGEFF_ERR_NMAX_EXCEEDED;
    case sigeff::ErrorCode::io:
      return SIGEFF_ERR_IO;
  }
  return SIGEFF_ERR_INTERNAL;
}

// Runs the wrapped body, translating exceptions into status codes and the
// per-thread error slot. A fresh call always clears the previous error.
template <typename Fn>
int guarded(Fn&& fn) {
  g_last_message.clear();
  g_last_detail = std::numeric_limits<double>::quiet_NaN();
  try {
    fn();
    return SIGEFF_OK;
  } catch (const sigeff::Error& e) {
    g_last_message = e.what();
    g_last_detail = e.detail();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_message = e.what();
    return SIGEFF_ERR_INTERNAL;
  } catch (...) {
    g_last_message = "unknown exception";
    return SIGEFF_ERR_INTERNAL;
  }
}

void require(const void* ptr, const char* what) {
  if (ptr == nullptr) {
    throw sigeff::Error::domain(std::string(what) + " must not be null");
  }
}

sigeff::GaussianSignalModel to_model(const sigeff_model* m) {
  require(m, "model");
  return sigeff::GaussianSignalModel(m->mu0, m->sigma0_sq, m->mu1,
                                     m->sigma1_sq);
}

const sigeff::DetectorSpec& to_spec(const sigeff_detector* d) {
  require(d, "detector");
  return d->spec;
}

sigeff_mc_config default_mc_config() {
  const sigeff::MCConfig cfg;
  return sigeff_mc_config{cfg.trials, cfg.seed, cfg.batch_size};
}

sigeff::MCConfig to_mc_config(const sigeff_mc_config* cfg) {
  const sigeff_mc_config c = cfg != nullptr ? *cfg : default_mc_config();
  sigeff::MCConfig out;
  out.trials = c.trials;
  out.seed = c.seed;
  out.batch_size = c.batch_size;
  return out;
}

sigeff_mc_estimate to_c(const sigeff::MCEstimate& e) {
  return sigeff_mc_estimate{e.estimate, e.std_error, e.ci_low, e.ci_high,
                            e.trials};
}

sigeff_moment_audit to_c(const sigeff::MomentAudit& a) {
  sigeff_moment_audit out;
  out.sample_mean = a.sample_mean;
  out.sample_var = a.sample_var;
  out.formula_mean = a.formula_mean;
  out.formula_var = a.formula_var;
  out.mean_gap_sds = a.mean_gap_sds;
  out.var_gap_rel = a.var_gap_rel;
  out.mean_std_error = a.mean_std_error;
  out.var_std_error = a.var_std_error;
  out.max_cdf_gap = a.max_cdf_gap;
  return out;
}

sigeff_convergence_record to_c(const sigeff::ConvergenceRecord& r) {
  sigeff_convergence_record out;
  out.n_a = r.n_a;
  out.n_b = r.n_b;
  out.mu1 = r.mu1;
  out.sigma1_sq = r.sigma1_sq;
  out.re = r.re;
  out.are = r.are;
  out.u = r.u;
  out.rhs = r.rhs;
  out.relative_gap = r.relative_gap;
  out.ok = r.ok ? 1 : 0;
  return out;
}

sigeff::ConvergenceRecord to_cpp(const sigeff_convergence_record& r) {
  sigeff::ConvergenceRecord out;
  out.n_a = r.n_a;
  out.n_b = r.n_b;
  out.mu1 = r.mu1;
  out.sigma1_sq = r.sigma1_sq;
  out.re = r.re;
  out.are = r.are;
  out.u = r.u;
  out.rhs = r.rhs;
  out.relative_gap = r.relative_gap;
  out.ok = r.ok != 0;
  return out;
}

}  // namespace

extern "C" {

const char* sigeff_version(void) { return "0.1.0"; }

const char* sigeff_status_name(int status) {
  switch (status) {
    case SIGEFF_OK:
      return "ok";
    case SIGEFF_ERR_DOMAIN:
      return "domain";
    case SIGEFF_ERR_NUMERIC:
      return "numeric";
    case SIGEFF_ERR_NO_DERIVATIVE:
      return "no_nonzero_derivative";
    case SIGEFF_ERR_INCOMPARABLE_ORDERS:
      return "incomparable_orders";
    case SIGEFF_ERR_NMAX_EXCEEDED:
      return "n_max_exceeded";
    case SIGEFF_ERR_IO:
      return "io";
    default:
      return "internal";
  }
}

const char* sigeff_last_error(void) { return g_last_message.c_str(); }

double sigeff_last_error_detail(void) { return g_last_detail; }

int sigeff_detector_create(const char* name, sigeff_detector** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    sigeff::DetectorSpec spec;
    const std::string id(name);
    if (id == "np") {
      spec = sigeff::np_random_signal_detector();
    } else if (id == "energy") {
      spec = sigeff::energy_detector();
    } else if (id == "linear") {
      spec = sigeff::linear_detector();
    } else {
      throw sigeff::Error::domain("unknown detector '" + id +
                                  "' (expected np, energy, or linear)");
    }
    *out = new sigeff_detector{std::move(spec)};
  });
}

void sigeff_detector_destroy(sigeff_detector* detector) { delete detector; }

const char* sigeff_detector_name(const sigeff_detector* detector) {
  return detector != nullptr ? detector->spec.name.c_str() : "";
}

int sigeff_delta(const sigeff_model* model, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = sigeff::delta(to_model(model));
  });
}

int sigeff_statistic(const sigeff_detector* detector,
                     const sigeff_model* model, const double* samples,
                     int64_t n, double* out) {
  return guarded([&] {
    require(out, "out");
    require(samples, "samples");
    if (n <= 0) {
      throw sigeff::Error::domain("sample count must be positive");
    }
    *out = to_spec(detector).statistic(
        std::span<const double>(samples, static_cast<std::size_t>(n)),
        to_model(model));
  });
}

int sigeff_sample(const sigeff_model* model, int hypothesis, int64_t n,
                  uint64_t seed, double* out_samples) {
  return guarded([&] {
    require(out_samples, "out_samples");
    const sigeff::SampleBatch batch = sigeff::sample(
        to_model(model),
        hypothesis == 0 ? sigeff::Hypothesis::h0 : sigeff::Hypothesis::h1, n,
        seed);
    std::memcpy(out_samples, batch.values.data(),
                batch.values.size() * sizeof(double));
  });
}

int sigeff_threshold_for_pf(const sigeff_model* model, int64_t n,
                            double alpha, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = sigeff::threshold_for_pf(to_model(model), n, alpha);
  });
}

int sigeff_threshold_for_pf_general(const sigeff_model* model, int64_t n,
                                    double alpha, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = sigeff::threshold_for_pf_general(to_model(model), n, alpha);
  });
}

int sigeff_pf_at_threshold(const sigeff_model* model, int64_t n,
                           double gamma_prime, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = sigeff::pf_at_threshold(to_model(model), n, gamma_prime);
  });
}

int sigeff_raw_threshold_for_pf(const sigeff_detector* detector,
                                const sigeff_model* model, int64_t n,
                                double alpha, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = sigeff::raw_threshold_for_pf(to_spec(detector), to_model(model), n,
                                        alpha);
  });
}

int sigeff_pf_at_raw_threshold(const sigeff_detector* detector,
                               const sigeff_model* model, int64_t n,
                               double threshold, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = sigeff::pf_at_raw_threshold(to_spec(detector), to_model(model), n,
                                       threshold);
  });
}

int sigeff_pd_generic(double mu_h0, double mu_h1, double sigma_h0,
                      double sigma_h1, double alpha, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = sigeff::pd_generic(mu_h0, mu_h1, sigma_h0, sigma_h1, alpha);
  });
}

int sigeff_pd_closed_form(const sigeff_model* model,
                          const sigeff_detector* detector, int64_t n,
                          double alpha, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = sigeff::pd_closed_form(to_model(model), to_spec(detector), n,
                                  alpha);
  });
}

int sigeff_general_mu0_moments(const sigeff_model* model, int64_t n,
                               sigeff_general_moments* out) {
  return guarded([&] {
    require(out, "out");
    const sigeff::GeneralMomentsReport r =
        sigeff::general_mu0_moments(to_model(model), n);
    out->h0_mean = r.h0_mean;
    out->h0_var = r.h0_var;
    out->h1_mean = r.h1_mean;
    out->h1_var = r.h1_var;
  });
}

int sigeff_pd_np_general(const sigeff_model* model, int64_t n, double alpha,
                         double* out) {
  return guarded([&] {
    require(out, "out");
    *out = sigeff::pd_np_general(to_model(model), n, alpha);
  });
}

int sigeff_efficacy(const sigeff_detector* detector,
                    const sigeff_model* model, int64_t n,
                    sigeff_efficacy_report* out) {
  return guarded([&] {
    require(out, "out");
    const sigeff::EfficacyReport r =
        sigeff::efficacy(to_spec(detector), to_model(model), n);
    out->nu = r.nu;
    out->derivative = r.derivative;
    out->sqrt_efficacy = r.sqrt_efficacy;
    out->n_used = r.n_used;
  });
}

int sigeff_are(const sigeff_detector* det_a, const sigeff_detector* det_b,
               const sigeff_model* model, int64_t n, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = sigeff::are(to_spec(det_a), to_spec(det_b), to_model(model), n);
  });
}

int sigeff_required_sample_size(const sigeff_detector* detector,
                                const sigeff_model* model, double alpha,
                                double beta, int64_t n_max, int64_t* out) {
  return guarded([&] {
    require(out, "out");
    *out = sigeff::required_sample_size(to_spec(detector), to_model(model),
                                        sigeff::OperatingPoint(alpha, beta),
                                        n_max);
  });
}

int sigeff_required_sample_size_real(const sigeff_detector* detector,
                                     const sigeff_model* model, double alpha,
                                     double beta, int64_t n_max,
                                     double* out) {
  return guarded([&] {
    require(out, "out");
    *out = sigeff::required_sample_size_real(
        to_spec(detector), to_model(model),
        sigeff::OperatingPoint(alpha, beta), n_max);
  });
}

int sigeff_relative_efficiency(const sigeff_detector* det_a,
                               const sigeff_detector* det_b,
                               const sigeff_model* model, double alpha,
                               double beta, int64_t n_max,
                               sigeff_re_report* out) {
  return guarded([&] {
    require(out, "out");
    const sigeff::REAREReport r = sigeff::relative_efficiency(
        to_spec(det_a), to_spec(det_b), to_model(model),
        sigeff::OperatingPoint(alpha, beta), n_max);
    out->n_a = r.n_a;
    out->n_b = r.n_b;
    out->re = r.re;
  });
}

int sigeff_taylor_remainder(const sigeff_detector* detector,
                            const sigeff_model* model, int64_t n, double s,
                            int32_t nu, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = sigeff::taylor_remainder(to_spec(detector), to_model(model), n, s,
                                    nu);
  });
}

int sigeff_u_term(const sigeff_detector* det_a, const sigeff_detector* det_b,
                  const sigeff_model* model_a, const sigeff_model* model_b,
                  int64_t n_a, int64_t n_b, double alpha, double s,
                  int32_t nu, sigeff_u_report* out) {
  return guarded([&] {
    require(out, "out");
    const sigeff::UTermReport r =
        sigeff::u_term(to_spec(det_a), to_spec(det_b), to_model(model_a),
                       to_model(model_b), n_a, n_b, alpha, s, nu);
    out->u = r.u;
    out->quantile_part = r.quantile_part;
    out->remainder_part = r.remainder_part;
  });
}

int sigeff_re_are_rhs(double variance_ratio, double are, double u,
                      double* out) {
  return guarded([&] {
    require(out, "out");
    *out = sigeff::re_are_rhs(variance_ratio, are, u);
  });
}

sigeff_schedule sigeff_schedule_default(void) {
  const sigeff::ScalingSchedule s;
  return sigeff_schedule{s.sigma0_sq, s.c_mu, s.mu_exponent, s.c_var,
                         s.var_exponent};
}

int sigeff_convergence_sweep(const sigeff_detector* det_a,
                             const sigeff_detector* det_b,
                             const sigeff_schedule* schedule, double alpha,
                             double beta, const int64_t* n_grid,
                             int64_t grid_len,
                             sigeff_convergence_record* out_records) {
  return guarded([&] {
    require(out_records, "out_records");
    require(n_grid, "n_grid");
    if (grid_len <= 0) {
      throw sigeff::Error::domain("grid_len must be positive");
    }
    sigeff::ScalingSchedule sched;
    if (schedule != nullptr) {
      sched.sigma0_sq = schedule->sigma0_sq;
      sched.c_mu = schedule->c_mu;
      sched.mu_exponent = schedule->mu_exponent;
      sched.c_var = schedule->c_var;
      sched.var_exponent = schedule->var_exponent;
    }
    const std::vector<std::int64_t> grid(n_grid, n_grid + grid_len);
    const std::vector<sigeff::ConvergenceRecord> records =
        sigeff::convergence_sweep(to_spec(det_a), to_spec(det_b), sched,
                                  alpha, beta, grid);
    for (std::size_t i = 0; i < records.size(); ++i) {
      out_records[i] = to_c(records[i]);
    }
  });
}

int sigeff_write_convergence_csv(const sigeff_convergence_record* records,
                                 int64_t count, const char* path) {
  return guarded([&] {
    require(records, "records");
    require(path, "path");
    if (count <= 0) {
      throw sigeff::Error::domain("record count must be positive");
    }
    std::vector<sigeff::ConvergenceRecord> rs;
    rs.reserve(static_cast<std::size_t>(count));
    for (int64_t i = 0; i < count; ++i) {
      rs.push_back(to_cpp(records[i]));
    }
    sigeff::write_convergence_csv(rs, path);
  });
}

int sigeff_read_convergence_csv(const char* path,
                                sigeff_convergence_record** out_records,
                                int64_t* out_count) {
  return guarded([&] {
    require(path, "path");
    require(out_records, "out_records");
    require(out_count, "out_count");
    const std::vector<sigeff::ConvergenceRecord> rs =
        sigeff::read_convergence_csv(path);
    sigeff_convergence_record* buf =
        rs.empty() ? nullptr : new sigeff_convergence_record[rs.size()];
    for (std::size_t i = 0; i < rs.size(); ++i) {
      buf[i] = to_c(rs[i]);
    }
    *out_records = buf;
    *out_count = static_cast<int64_t>(rs.size());
  });
}

void sigeff_records_free(sigeff_convergence_record* records) {
  delete[] records;
}

sigeff_mc_config sigeff_mc_config_default(void) { return default_mc_config(); }

int sigeff_empirical_pf_pd(const sigeff_model* model,
                           const sigeff_detector* detector, int64_t n,
                           double threshold, const sigeff_mc_config* cfg,
                           sigeff_mc_estimate* out_pf,
                           sigeff_mc_estimate* out_pd) {
  return guarded([&] {
    require(out_pf, "out_pf");
    require(out_pd, "out_pd");
    const auto [pf, pd] = sigeff::empirical_pf_pd(
        to_model(model), to_spec(detector), n, threshold, to_mc_config(cfg));
    *out_pf = to_c(pf);
    *out_pd = to_c(pd);
  });
}

int sigeff_empirical_required_n(const sigeff_detector* detector,
                                const sigeff_model* model, double alpha,
                                double beta, const sigeff_mc_config* cfg,
                                int64_t n_max, int64_t* out) {
  return guarded([&] {
    require(out, "out");
    *out = sigeff::empirical_required_n(to_spec(detector), to_model(model),
                                        sigeff::OperatingPoint(alpha, beta),
                                        to_mc_config(cfg), n_max);
  });
}

int sigeff_approximation_audit(const sigeff_model* model, int64_t n,
                               const sigeff_mc_config* cfg,
                               sigeff_audit* out) {
  return guarded([&] {
    require(out, "out");
    const sigeff::ApproximationAudit a =
        sigeff::approximation_audit(to_model(model), n, to_mc_config(cfg));
    out->h0 = to_c(a.h0);
    out->h1 = to_c(a.h1);
    out->trials = a.trials;
  });
}

}  // extern "C"
