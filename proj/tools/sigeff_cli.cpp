// Command-line front end for the signal-detection efficiency library.
// Each invocation runs one subcommand and writes one artifact (JSON, or CSV
// for convergence sweeps). Everything goes through the public C API so this
// binary doubles as a smoke test of the shared library surface.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <sigeff.h>

using nlohmann::json;

namespace {

constexpr const char* kSchemaVersion = "v1";

// Config mistakes (bad flag values, unknown detectors, malformed grids) are
// usage errors and exit 2; failures inside the library exit 1 with a
// machine-readable record on stderr.
struct UsageError {
  std::string message;
};

struct DetectorHandle {
  sigeff_detector* ptr = nullptr;
  explicit DetectorHandle(const std::string& name) {
    if (sigeff_detector_create(name.c_str(), &ptr) != SIGEFF_OK) {
      throw UsageError{"unknown detector '" + name + "'"};
    }
  }
  ~DetectorHandle() { sigeff_detector_destroy(ptr); }
  DetectorHandle(const DetectorHandle&) = delete;
  DetectorHandle& operator=(const DetectorHandle&) = delete;
};

struct ComputationError {
  int status;
  std::string operation;
};

// Wraps a C API call; on failure remembers which operation failed so the
// error record can name it.
int check(int status, const char* operation) {
  if (status != SIGEFF_OK) {
    throw ComputationError{status, operation};
  }
  return status;
}

void require_prob(double value, const std::string& flag) {
  if (!(value > 0.0) || !(value < 1.0)) {
    throw UsageError{flag + " must lie strictly between 0 and 1"};
  }
}

void require_positive(long long value, const std::string& flag) {
  if (value < 1) {
    throw UsageError{flag + " must be at least 1"};
  }
}

struct ModelFlags {
  double mu0 = 0.0;
  double sigma0_sq = 1.0;
  double mu1 = 0.1;
  double sigma1_sq = 1.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--mu0", mu0, "H0 sample mean");
    cmd->add_option("--sigma0-sq", sigma0_sq, "noise variance");
    cmd->add_option("--mu1", mu1, "signal mean");
    cmd->add_option("--sigma1-sq", sigma1_sq, "signal variance");
  }

  sigeff_model model() const {
    if (!(sigma0_sq > 0.0)) {
      throw UsageError{"--sigma0-sq must be positive"};
    }
    if (!(sigma1_sq > 0.0)) {
      throw UsageError{"--sigma1-sq must be positive"};
    }
    return sigeff_model{mu0, sigma0_sq, mu1, sigma1_sq};
  }

  json to_json() const {
    return json{{"mu0", mu0},
                {"sigma0_sq", sigma0_sq},
                {"mu1", mu1},
                {"sigma1_sq", sigma1_sq}};
  }
};

struct OutputFlags {
  std::string path;
  std::string format;  // empty means the command default

  void attach(CLI::App* cmd, bool allow_csv) {
    cmd->add_option("--output", path, "output file path");
    if (allow_csv) {
      cmd->add_option("--format", format, "output format (csv or json)")
          ->check(CLI::IsMember({"csv", "json"}));
    } else {
      cmd->add_option("--format", format, "output format (json)")
          ->check(CLI::IsMember({"json"}));
    }
  }

  // Default artifact location: $SIGEFF_OUT_DIR (or the working directory)
  // with the command name as the file stem.
  std::string resolve(const std::string& command,
                      const std::string& extension) const {
    if (!path.empty()) {
      return path;
    }
    const char* dir = std::getenv("SIGEFF_OUT_DIR");
    const std::string base = (dir != nullptr && *dir != '\0')
                                 ? std::string(dir) + "/"
                                 : std::string();
    return base + command + "." + extension;
  }
};

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.flush();
  if (!out) {
    throw ComputationError{SIGEFF_ERR_IO, "write '" + path + "'"};
  }
}

// Emits the versioned envelope shared by every JSON artifact.
std::string emit_json(const std::string& command, const std::string& path,
                      const json& params, const json& result,
                      const json* model) {
  json doc{{"schema_version", kSchemaVersion},
           {"command", command},
           {"params", params},
           {"result", result}};
  if (model != nullptr) {
    doc["model"] = *model;
  }
  write_text_file(path, doc.dump(2) + "\n");
  return path;
}

json estimate_json(const sigeff_mc_estimate& e) {
  return json{{"estimate", e.estimate},
              {"std_error", e.std_error},
              {"ci_low", e.ci_low},
              {"ci_high", e.ci_high},
              {"trials", e.trials}};
}

json audit_side_json(const sigeff_moment_audit& a) {
  return json{{"sample_mean", a.sample_mean},
              {"sample_var", a.sample_var},
              {"formula_mean", a.formula_mean},
              {"formula_var", a.formula_var},
              {"mean_gap_sds", a.mean_gap_sds},
              {"var_gap_rel", a.var_gap_rel},
              {"mean_std_error", a.mean_std_error},
              {"var_std_error", a.var_std_error},
              {"max_cdf_gap", a.max_cdf_gap}};
}

json record_json(const sigeff_convergence_record& r) {
  auto field = [](double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
  };
  return json{{"n_a", field(r.n_a)},
              {"n_b", field(r.n_b)},
              {"mu1", field(r.mu1)},
              {"sigma1_sq", field(r.sigma1_sq)},
              {"re", field(r.re)},
              {"are", field(r.are)},
              {"u", field(r.u)},
              {"rhs", field(r.rhs)},
              {"relative_gap", field(r.relative_gap)},
              {"ok", r.ok != 0}};
}

int run_threshold(const ModelFlags& mf, const OutputFlags& of, long long n,
                  double alpha) {
  require_positive(n, "--n");
  require_prob(alpha, "--alpha");
  const sigeff_model m = mf.model();

  double gamma_prime = 0.0;
  check(sigeff_threshold_for_pf_general(&m, n, alpha, &gamma_prime),
        "sigeff_threshold_for_pf_general");
  double pf = 0.0;
  check(sigeff_pf_at_threshold(&m, n, gamma_prime, &pf),
        "sigeff_pf_at_threshold");

  const json model = mf.to_json();
  const json params{{"n", n}, {"alpha", alpha}};
  const json result{{"gamma_prime", gamma_prime},
                    {"raw_threshold", gamma_prime / m.sigma1_sq},
                    {"pf_at_threshold", pf}};
  std::cout << emit_json("threshold", of.resolve("threshold", "json"),
                         params, result, &model)
            << "\n";
  return 0;
}

int run_roc(const ModelFlags& mf, const OutputFlags& of,
            const std::string& detector, long long n,
            std::vector<double> alpha_grid) {
  require_positive(n, "--n");
  if (alpha_grid.empty()) {
    alpha_grid = {0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5};
  }
  for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
    require_prob(alpha_grid[i], "--alpha-grid");
    if (i > 0 && alpha_grid[i] <= alpha_grid[i - 1]) {
      throw UsageError{"--alpha-grid must be strictly increasing"};
    }
  }
  const sigeff_model m = mf.model();
  DetectorHandle det(detector);

  json points = json::array();
  for (double alpha : alpha_grid) {
    double raw = 0.0;
    check(sigeff_raw_threshold_for_pf(det.ptr, &m, n, alpha, &raw),
          "sigeff_raw_threshold_for_pf");
    double pd = 0.0;
    check(sigeff_pd_closed_form(&m, det.ptr, n, alpha, &pd),
          "sigeff_pd_closed_form");
    points.push_back(
        json{{"alpha", alpha}, {"raw_threshold", raw}, {"pd", pd}});
  }

  const json model = mf.to_json();
  const json params{{"detector", detector}, {"n", n}};
  const json result{{"points", points}};
  std::cout << emit_json("roc", of.resolve("roc", "json"), params, result,
                         &model)
            << "\n";
  return 0;
}

int run_efficacy(const ModelFlags& mf, const OutputFlags& of,
                 const std::string& detector, long long n) {
  require_positive(n, "--n");
  const sigeff_model m = mf.model();
  DetectorHandle det(detector);

  sigeff_efficacy_report report;
  check(sigeff_efficacy(det.ptr, &m, n, &report), "sigeff_efficacy");

  const json model = mf.to_json();
  const json params{{"detector", detector}, {"n", n}};
  const json result{{"nu", report.nu},
                    {"derivative", report.derivative},
                    {"sqrt_efficacy", report.sqrt_efficacy},
                    {"n_used", report.n_used}};
  std::cout << emit_json("efficacy", of.resolve("efficacy", "json"), params,
                         result, &model)
            << "\n";
  return 0;
}

int run_are(const ModelFlags& mf, const OutputFlags& of, const std::string& a,
            const std::string& b, long long n) {
  require_positive(n, "--n");
  const sigeff_model m = mf.model();
  DetectorHandle det_a(a);
  DetectorHandle det_b(b);

  double ratio = 0.0;
  check(sigeff_are(det_a.ptr, det_b.ptr, &m, n, &ratio), "sigeff_are");

  const json model = mf.to_json();
  const json params{{"a", a}, {"b", b}, {"n", n}};
  const json result{{"are", ratio}};
  std::cout << emit_json("are", of.resolve("are", "json"), params, result,
                         &model)
            << "\n";
  return 0;
}

int run_re(const ModelFlags& mf, const OutputFlags& of, const std::string& a,
           const std::string& b, double alpha, double beta, long long n_max) {
  require_prob(alpha, "--alpha");
  require_prob(beta, "--beta");
  if (!(alpha < beta)) {
    throw UsageError{"--alpha must be smaller than --beta"};
  }
  require_positive(n_max, "--n-max");
  const sigeff_model m = mf.model();
  DetectorHandle det_a(a);
  DetectorHandle det_b(b);

  sigeff_re_report report;
  check(sigeff_relative_efficiency(det_a.ptr, det_b.ptr, &m, alpha, beta,
                                   n_max, &report),
        "sigeff_relative_efficiency");

  const json model = mf.to_json();
  const json params{
      {"a", a}, {"b", b}, {"alpha", alpha}, {"beta", beta}, {"n_max", n_max}};
  const json result{
      {"n_a", report.n_a}, {"n_b", report.n_b}, {"re", report.re}};
  std::cout << emit_json("re", of.resolve("re", "json"), params, result,
                         &model)
            << "\n";
  return 0;
}

int run_converge(const OutputFlags& of, const std::string& a,
                 const std::string& b, double alpha, double beta,
                 std::vector<long long> n_grid, double sigma0_sq, double c_mu,
                 double mu_exponent, double c_var, double var_exponent) {
  require_prob(alpha, "--alpha");
  require_prob(beta, "--beta");
  if (!(alpha < beta)) {
    throw UsageError{"--alpha must be smaller than --beta"};
  }
  if (n_grid.empty()) {
    n_grid = {1000, 10000, 100000};
  }
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    require_positive(n_grid[i], "--n-grid");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) {
      throw UsageError{"--n-grid must be strictly increasing"};
    }
  }
  if (!(sigma0_sq > 0.0)) {
    throw UsageError{"--sigma0-sq must be positive"};
  }
  if (!(c_var > 0.0)) {
    throw UsageError{"--c-var must be positive"};
  }
  DetectorHandle det_a(a);
  DetectorHandle det_b(b);

  sigeff_schedule schedule = sigeff_schedule_default();
  schedule.sigma0_sq = sigma0_sq;
  schedule.c_mu = c_mu;
  schedule.mu_exponent = mu_exponent;
  schedule.c_var = c_var;
  schedule.var_exponent = var_exponent;

  std::vector<int64_t> grid(n_grid.begin(), n_grid.end());
  std::vector<sigeff_convergence_record> records(grid.size());
  check(sigeff_convergence_sweep(det_a.ptr, det_b.ptr, &schedule, alpha, beta,
                                 grid.data(),
                                 static_cast<int64_t>(grid.size()),
                                 records.data()),
        "sigeff_convergence_sweep");

  const std::string format = of.format.empty() ? "csv" : of.format;
  if (format == "csv") {
    const std::string path = of.resolve("converge", "csv");
    check(sigeff_write_convergence_csv(records.data(),
                                       static_cast<int64_t>(records.size()),
                                       path.c_str()),
          "sigeff_write_convergence_csv");
    std::cout << path << "\n";
    return 0;
  }

  json rows = json::array();
  for (const auto& r : records) {
    rows.push_back(record_json(r));
  }
  const json params{{"a", a},
                    {"b", b},
                    {"alpha", alpha},
                    {"beta", beta},
                    {"n_grid", n_grid},
                    {"schedule",
                     json{{"sigma0_sq", sigma0_sq},
                          {"c_mu", c_mu},
                          {"mu_exponent", std::isfinite(mu_exponent)
                                              ? json(mu_exponent)
                                              : json(nullptr)},
                          {"c_var", c_var},
                          {"var_exponent", var_exponent}}}};
  const json result{{"records", rows}};
  std::cout << emit_json("converge", of.resolve("converge", "json"), params,
                         result, nullptr)
            << "\n";
  return 0;
}

int run_mc_validate(const ModelFlags& mf, const OutputFlags& of,
                    const std::string& detector, long long n, double alpha,
                    long long trials, std::uint64_t seed,
                    long long batch_size, bool audit) {
  require_positive(n, "--n");
  require_prob(alpha, "--alpha");
  if (trials < 100) {
    throw UsageError{"--trials must be at least 100"};
  }
  if (batch_size < 1 || batch_size > trials) {
    throw UsageError{"--batch-size must lie in [1, trials]"};
  }
  const sigeff_model m = mf.model();
  DetectorHandle det(detector);

  sigeff_mc_config cfg = sigeff_mc_config_default();
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.batch_size = batch_size;

  double raw = 0.0;
  check(sigeff_raw_threshold_for_pf(det.ptr, &m, n, alpha, &raw),
        "sigeff_raw_threshold_for_pf");
  double pf_closed = 0.0;
  check(sigeff_pf_at_raw_threshold(det.ptr, &m, n, raw, &pf_closed),
        "sigeff_pf_at_raw_threshold");
  double pd_closed = 0.0;
  check(sigeff_pd_closed_form(&m, det.ptr, n, alpha, &pd_closed),
        "sigeff_pd_closed_form");

  sigeff_mc_estimate pf_emp, pd_emp;
  check(sigeff_empirical_pf_pd(&m, det.ptr, n, raw, &cfg, &pf_emp, &pd_emp),
        "sigeff_empirical_pf_pd");

  json result{{"raw_threshold", raw},
              {"closed_form", json{{"pf", pf_closed}, {"pd", pd_closed}}},
              {"empirical", json{{"pf", estimate_json(pf_emp)},
                                 {"pd", estimate_json(pd_emp)}}}};
  if (audit) {
    sigeff_audit report;
    check(sigeff_approximation_audit(&m, n, &cfg, &report),
          "sigeff_approximation_audit");
    result["audit"] = json{{"h0", audit_side_json(report.h0)},
                           {"h1", audit_side_json(report.h1)},
                           {"trials", report.trials}};
  }

  const json model = mf.to_json();
  const json params{{"detector", detector},
                    {"n", n},
                    {"alpha", alpha},
                    {"trials", trials},
                    {"seed", seed},
                    {"batch_size", batch_size},
                    {"audit", audit}};
  std::cout << emit_json("mc-validate", of.resolve("mc-validate", "json"),
                         params, result, &model)
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-form and Monte Carlo performance of quadratic "
               "signal detectors"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sigeff_version()));
  // Repeated flags override earlier ones, the usual shell-alias convention.
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  const std::vector<std::string> detectors{"np", "energy", "linear"};

  // threshold
  auto* threshold = app.add_subcommand(
      "threshold", "closed-form detection threshold for a target P_F");
  ModelFlags threshold_model;
  OutputFlags threshold_out;
  long long threshold_n = 100;
  double threshold_alpha = 0.1;
  threshold_model.attach(threshold);
  threshold_out.attach(threshold, false);
  threshold->add_option("--n", threshold_n, "samples per decision");
  threshold->add_option("--alpha", threshold_alpha, "false-alarm target");

  // roc
  auto* roc = app.add_subcommand(
      "roc", "closed-form (alpha, P_D) curve for one detector");
  ModelFlags roc_model;
  OutputFlags roc_out;
  std::string roc_detector = "np";
  long long roc_n = 100;
  std::vector<double> roc_alpha_grid;
  roc_model.attach(roc);
  roc_out.attach(roc, false);
  roc->add_option("--detector", roc_detector, "detector name")
      ->check(CLI::IsMember(detectors));
  roc->add_option("--n", roc_n, "samples per decision");
  roc->add_option("--alpha-grid", roc_alpha_grid,
                  "false-alarm grid (strictly increasing)")
      ->delimiter(',');

  // efficacy
  auto* efficacy = app.add_subcommand(
      "efficacy", "derivative order and efficacy of a detector");
  ModelFlags efficacy_model;
  OutputFlags efficacy_out;
  std::string efficacy_detector = "np";
  long long efficacy_n = 100000;
  efficacy_model.attach(efficacy);
  efficacy_out.attach(efficacy, false);
  efficacy->add_option("--detector", efficacy_detector, "detector name")
      ->check(CLI::IsMember(detectors));
  efficacy->add_option("--n", efficacy_n, "sample count for the probe");

  // are
  auto* are = app.add_subcommand(
      "are", "asymptotic relative efficiency of two detectors");
  ModelFlags are_model;
  OutputFlags are_out;
  std::string are_a = "np";
  std::string are_b = "energy";
  long long are_n = 100000;
  are_model.attach(are);
  are_out.attach(are, false);
  are->add_option("--a", are_a, "detector A")->check(CLI::IsMember(detectors));
  are->add_option("--b", are_b, "detector B")->check(CLI::IsMember(detectors));
  are->add_option("--n", are_n, "sample count for the probe");

  // re
  auto* re = app.add_subcommand(
      "re", "finite-sample relative efficiency at an operating point");
  ModelFlags re_model;
  OutputFlags re_out;
  std::string re_a = "np";
  std::string re_b = "energy";
  double re_alpha = 0.1;
  double re_beta = 0.9;
  long long re_n_max = 1LL << 22;
  re_model.attach(re);
  re_out.attach(re, false);
  re->add_option("--a", re_a, "detector A")->check(CLI::IsMember(detectors));
  re->add_option("--b", re_b, "detector B")->check(CLI::IsMember(detectors));
  re->add_option("--alpha", re_alpha, "false-alarm target");
  re->add_option("--beta", re_beta, "detection target");
  re->add_option("--n-max", re_n_max, "sample-size search cap");

  // converge
  auto* converge = app.add_subcommand(
      "converge", "RE vs bridge-formula sweep along a signal schedule");
  OutputFlags converge_out;
  std::string converge_a = "np";
  std::string converge_b = "energy";
  double converge_alpha = 0.1;
  double converge_beta = 0.9;
  std::vector<long long> converge_grid;
  double converge_sigma0_sq = 1.0;
  double converge_c_mu = 0.5;
  double converge_mu_exp = std::nan("");
  double converge_c_var = 1.0;
  double converge_var_exp = 0.0;
  converge_out.attach(converge, true);
  converge->add_option("--a", converge_a, "detector A")
      ->check(CLI::IsMember(detectors));
  converge->add_option("--b", converge_b, "detector B")
      ->check(CLI::IsMember(detectors));
  converge->add_option("--alpha", converge_alpha, "false-alarm target");
  converge->add_option("--beta", converge_beta, "detection target");
  converge->add_option("--n-grid", converge_grid,
                       "grid of schedule indices (strictly increasing)")
      ->delimiter(',');
  converge->add_option("--sigma0-sq", converge_sigma0_sq, "noise variance");
  converge->add_option("--c-mu", converge_c_mu, "signal-mean coefficient");
  converge->add_option("--mu-exponent", converge_mu_exp,
                       "signal-mean exponent (default: Pitman rate)");
  converge->add_option("--c-var", converge_c_var,
                       "signal-variance coefficient");
  converge->add_option("--var-exponent", converge_var_exp,
                       "signal-variance decay exponent");

  // mc-validate
  auto* mc = app.add_subcommand(
      "mc-validate", "Monte Carlo check of the closed-form performance");
  ModelFlags mc_model;
  OutputFlags mc_out;
  std::string mc_detector = "np";
  long long mc_n = 1000;
  double mc_alpha = 0.1;
  long long mc_trials = 100000;
  std::uint64_t mc_seed = sigeff_mc_config_default().seed;
  long long mc_batch = sigeff_mc_config_default().batch_size;
  bool mc_audit = false;
  mc_model.attach(mc);
  mc_out.attach(mc, false);
  mc->add_option("--detector", mc_detector, "detector name")
      ->check(CLI::IsMember(detectors));
  mc->add_option("--n", mc_n, "samples per decision");
  mc->add_option("--alpha", mc_alpha, "false-alarm target");
  mc->add_option("--trials", mc_trials, "Monte Carlo trials");
  mc->add_option("--seed", mc_seed, "random seed");
  mc->add_option("--batch-size", mc_batch, "trial batch size");
  mc->add_flag("--audit", mc_audit, "include the moment audit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (threshold->parsed()) {
      return run_threshold(threshold_model, threshold_out, threshold_n,
                           threshold_alpha);
    }
    if (roc->parsed()) {
      return run_roc(roc_model, roc_out, roc_detector, roc_n, roc_alpha_grid);
    }
    if (efficacy->parsed()) {
      return run_efficacy(efficacy_model, efficacy_out, efficacy_detector,
                          efficacy_n);
    }
    if (are->parsed()) {
      return run_are(are_model, are_out, are_a, are_b, are_n);
    }
    if (re->parsed()) {
      return run_re(re_model, re_out, re_a, re_b, re_alpha, re_beta,
                    re_n_max);
    }
    if (converge->parsed()) {
      return run_converge(converge_out, converge_a, converge_b,
                          converge_alpha, converge_beta, converge_grid,
                          converge_sigma0_sq, converge_c_mu, converge_mu_exp,
                          converge_c_var, converge_var_exp);
    }
    if (mc->parsed()) {
      // The default batch size only tiles the trial loop, so shrink it to
      // fit when the user lowers --trials without picking a batch size.
      if (mc->count("--batch-size") == 0 && mc_batch > mc_trials) {
        mc_batch = mc_trials;
      }
      return run_mc_validate(mc_model, mc_out, mc_detector, mc_n, mc_alpha,
                             mc_trials, mc_seed, mc_batch, mc_audit);
    }
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << e.message << "\n";
    return 2;
  } catch (const ComputationError& e) {
    const json record{
        {"error", json{{"code", e.status},
                       {"name", sigeff_status_name(e.status)},
                       {"message", sigeff_last_error()},
                       {"operation", e.operation},
                       {"command", command}}}};
    std::cerr << record.dump() << "\n";
    return 1;
  }
}
