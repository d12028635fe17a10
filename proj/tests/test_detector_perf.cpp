#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "detector_perf.hpp"
#include "error.hpp"
#include "signal_model.hpp"
#include "stats_core.hpp"
#include "support/oracles.hpp"

using sigeff::DetectorSpec;
using sigeff::GaussianSignalModel;

namespace {

// Test-side normal generator, independent of the library RNG and quantile.
struct BoxMuller {
  explicit BoxMuller(std::uint64_t seed) : rng(seed) {}
  double next() {
    if (have_spare) {
      have_spare = false;
      return spare;
    }
    const double u1 = rng.uniform(1e-17, 1.0);
    const double u2 = rng.uniform(0.0, 1.0);
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare = r * std::sin(2.0 * M_PI * u2);
    have_spare = true;
    return r * std::cos(2.0 * M_PI * u2);
  }
  oracle::Rng rng;
  double spare = 0.0;
  bool have_spare = false;
};

// Empirical exceedance probability of T(x) > threshold with x drawn i.i.d.
// from N(mean, var), using the detector's own statistic.
double mc_exceedance(const DetectorSpec& det, const GaussianSignalModel& model,
                     double mean, double var, std::int64_t n, double threshold,
                     int trials, std::uint64_t seed) {
  BoxMuller g(seed);
  const double sd = std::sqrt(var);
  std::vector<double> x(static_cast<std::size_t>(n));
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    for (auto& v : x) v = mean + sd * g.next();
    if (det.statistic(x, model) > threshold) ++hits;
  }
  return double(hits) / double(trials);
}

}  // namespace

TEST_CASE("operating point validation") {
  CHECK_NOTHROW(sigeff::OperatingPoint(0.1, 0.9));
  CHECK_THROWS_AS(sigeff::OperatingPoint(0.0, 0.9), sigeff::Error);
  CHECK_THROWS_AS(sigeff::OperatingPoint(0.5, 0.5), sigeff::Error);
  CHECK_THROWS_AS(sigeff::OperatingPoint(0.5, 0.2), sigeff::Error);
  CHECK_THROWS_AS(sigeff::OperatingPoint(0.1, 1.0), sigeff::Error);
}

TEST_CASE("quadratic detector moment formulas") {
  auto np = sigeff::np_random_signal_detector();
  GaussianSignalModel null_only(0.0, 1.0, 0.0, 1.0);
  CHECK(np.mean_h0(10.0, null_only) == doctest::Approx(10.0));
  CHECK(np.var_h0(10.0, null_only) == doctest::Approx(20.0));
  CHECK(np.mean_h1(10.0, null_only) == doctest::Approx(20.0));
  CHECK(np.var_h1(10.0, null_only) == doctest::Approx(80.0));

  // delta = 1 here; the formula value is 2[10 + 2.5 + 2.5] = 30. This is the
  // normal-limit mean, not the exact E[T] (= 27.5): the limit moments absorb
  // mu1^2 terms without the variance scaling. The gap is measured by the
  // moment audit tests, not asserted away here.
  GaussianSignalModel shifted(0.0, 1.0, 0.5, 1.0);
  CHECK(sigeff::delta(shifted) == doctest::Approx(1.0));
  CHECK(np.mean_h1(10.0, shifted) == doctest::Approx(30.0));

  GaussianSignalModel nonzero_mu0(0.2, 1.0, 0.5, 1.0);
  CHECK_THROWS_AS(np.mean_h0(10.0, nonzero_mu0), sigeff::Error);
  CHECK_THROWS_AS(np.var_h1(10.0, nonzero_mu0), sigeff::Error);
}

TEST_CASE("energy detector moment formulas") {
  auto en = sigeff::energy_detector();
  GaussianSignalModel m(0.0, 1.0, 0.0, 1.0);
  CHECK(en.mean_h0(10.0, m) == doctest::Approx(10.0));
  CHECK(en.var_h0(10.0, m) == doctest::Approx(20.0));
  CHECK(en.mean_h1(10.0, m) == doctest::Approx(20.0));

  // Zero signal mean: noncentrality vanishes, var_h1 = 2N(sigma0^2+sigma1^2)^2.
  oracle::Rng rng(31);
  for (int i = 0; i < 20; ++i) {
    GaussianSignalModel r(0.0, rng.uniform(0.2, 3.0), 0.0,
                          rng.uniform(0.2, 3.0));
    const double s2 = r.sigma0_sq + r.sigma1_sq;
    CHECK(en.var_h1(50.0, r) == doctest::Approx(100.0 * s2 * s2).epsilon(1e-13));
  }
}

TEST_CASE("linear detector moment formulas") {
  auto lin = sigeff::linear_detector();
  GaussianSignalModel m(0.0, 1.0, 0.0, 1.0);
  CHECK(lin.mean_h1(7.0, m) == 0.0);
  CHECK(lin.var_h0(100.0, m) == doctest::Approx(100.0));
  GaussianSignalModel shifted(0.0, 1.0, 0.5, 1.0);
  CHECK(lin.mean_h1(4.0, shifted) - lin.mean_h0(4.0, shifted) ==
        doctest::Approx(2.0));
  // mu0 enters directly, no restriction.
  GaussianSignalModel off(0.7, 1.0, 0.5, 1.0);
  CHECK(lin.mean_h0(10.0, off) == doctest::Approx(7.0));
}

TEST_CASE("quadratic detector moments match simulation when exact") {
  // With mu1 = 0 the normal-limit moments coincide with the exact ones, so
  // the 5-standard-error comparison is a true calibration check.
  auto np = sigeff::np_random_signal_detector();
  GaussianSignalModel m(0.0, 1.0, 0.0, 1.5);
  const int trials = 100000;
  for (std::int64_t n : {std::int64_t(10), std::int64_t(100)}) {
    for (int hyp = 0; hyp < 2; ++hyp) {
      const double mean = hyp == 0 ? 0.0 : 0.0;
      const double var = hyp == 0 ? m.sigma0_sq : m.sigma0_sq + m.sigma1_sq;
      const double f_mean =
          hyp == 0 ? np.mean_h0(double(n), m) : np.mean_h1(double(n), m);
      const double f_var =
          hyp == 0 ? np.var_h0(double(n), m) : np.var_h1(double(n), m);

      BoxMuller g(1000 + 10 * std::uint64_t(n) + std::uint64_t(hyp));
      std::vector<double> x(static_cast<std::size_t>(n));
      double s = 0.0, ss = 0.0;
      for (int t = 0; t < trials; ++t) {
        for (auto& v : x) v = mean + std::sqrt(var) * g.next();
        const double stat = np.statistic(x, m);
        s += stat;
        ss += stat * stat;
      }
      const double mc_mean = s / trials;
      const double mc_var = ss / trials - mc_mean * mc_mean;
      CHECK(std::abs(mc_mean - f_mean) <= 5.0 * std::sqrt(f_var / trials));
      // Normal-theory standard error of a sample variance.
      CHECK(std::abs(mc_var - f_var) <=
            5.0 * f_var * std::sqrt(2.0 / trials));
    }
  }
}

TEST_CASE("threshold from false-alarm constraint") {
  GaussianSignalModel m(0.0, 1.0, 0.0, 1.0);
  SUBCASE("median alpha drops the quantile term") {
    oracle::Rng rng(77);
    for (int i = 0; i < 10; ++i) {
      GaussianSignalModel r(0.0, rng.uniform(0.2, 3.0), rng.uniform(-0.5, 0.5),
                            rng.uniform(0.2, 3.0));
      CHECK(sigeff::threshold_for_pf(r, 50, 0.5) ==
            doctest::Approx(r.sigma0_sq * r.sigma1_sq * 50.0).epsilon(1e-14));
    }
  }
  SUBCASE("pinned evaluation at N=100") {
    const double got = sigeff::threshold_for_pf(m, 100, 0.1);
    const double want =
        sigeff::normal_quantile(0.9) * std::sqrt(200.0) + 100.0;
    CHECK(got == doctest::Approx(want).epsilon(1e-15));
    CHECK(got == doctest::Approx(118.1238760487364).epsilon(1e-9));
    CHECK(sigeff::pf_at_threshold(m, 100, got) ==
          doctest::Approx(0.1).epsilon(1e-10));
  }
  SUBCASE("threshold decreases with alpha") {
    CHECK(sigeff::threshold_for_pf(m, 100, 0.01) >
          sigeff::threshold_for_pf(m, 100, 0.2));
  }
  SUBCASE("rejects bad inputs") {
    GaussianSignalModel off(0.5, 1.0, 0.0, 1.0);
    CHECK_THROWS_AS(sigeff::threshold_for_pf(off, 100, 0.1), sigeff::Error);
    CHECK_THROWS_AS(sigeff::threshold_for_pf(m, 100, 0.0), sigeff::Error);
    CHECK_THROWS_AS(sigeff::threshold_for_pf(m, 100, 1.0), sigeff::Error);
    CHECK_THROWS_AS(sigeff::threshold_for_pf(m, 0, 0.1), sigeff::Error);
  }
}

TEST_CASE("general-mu0 threshold") {
  SUBCASE("reduces exactly to the mu0=0 formula") {
    oracle::Rng rng(55);
    for (int i = 0; i < 25; ++i) {
      GaussianSignalModel r(0.0, rng.uniform(0.2, 3.0), rng.uniform(-1.0, 1.0),
                            rng.uniform(0.2, 3.0));
      const std::int64_t n = rng.uniform_int(1, 2000);
      const double alpha = rng.uniform(0.01, 0.99);
      CHECK(sigeff::threshold_for_pf_general(r, n, alpha) ==
            sigeff::threshold_for_pf(r, n, alpha));
    }
  }
  SUBCASE("hand-evaluated bracket at alpha = 1/2") {
    GaussianSignalModel m(1.0, 1.0, 0.0, 1.0);  // delta = 2
    CHECK(sigeff::threshold_for_pf_general(m, 25, 0.5) ==
          doctest::Approx(100.0).epsilon(1e-14));
  }
  SUBCASE("closed-form round trip holds for any mu0") {
    GaussianSignalModel m(0.3, 1.0, 0.2, 1.0);
    const double g = sigeff::threshold_for_pf_general(m, 100, 0.1);
    CHECK(sigeff::pf_at_threshold(m, 100, g) ==
          doctest::Approx(0.1).epsilon(1e-10));
  }
  SUBCASE("simulated false alarm exposes the dropped covariance") {
    // For mu0 != 0 the closed-form null variance omits the covariance
    // between sum x^2 and delta sum x (per sample: 4 delta mu0 sigma0^2),
    // so the true false-alarm rate sits above alpha. The simulation agrees
    // with the covariance-corrected normal prediction, not with alpha.
    GaussianSignalModel m(0.3, 1.0, 0.2, 1.0);  // delta = 1
    const std::int64_t n = 100;
    const double alpha = 0.1;
    const double g = sigeff::threshold_for_pf_general(m, n, alpha);
    auto np = sigeff::np_random_signal_detector();
    DetectorSpec stat_only;
    stat_only.name = "np-stat";
    stat_only.statistic = np.statistic;
    const int trials = 100000;
    const double pf = mc_exceedance(stat_only, m, m.mu0, m.sigma0_sq, n,
                                    g / m.sigma1_sq, trials, 4242);

    const double dl = sigeff::delta(m);
    const double true_mean =
        n * (m.sigma0_sq + m.mu0 * m.mu0) + dl * n * m.mu0;
    const double per_sample_var =
        2.0 * m.sigma0_sq * m.sigma0_sq +
        4.0 * m.sigma0_sq * m.mu0 * m.mu0 + dl * dl * m.sigma0_sq +
        4.0 * dl * m.mu0 * m.sigma0_sq;
    const double predicted = sigeff::q_function(
        (g / m.sigma1_sq - true_mean) / std::sqrt(double(n) * per_sample_var));

    const double se = std::sqrt(predicted * (1.0 - predicted) / trials);
    CHECK(std::abs(pf - predicted) < 0.01);
    CHECK(pf > alpha + 10.0 * se);
  }
}

TEST_CASE("generic detection probability") {
  SUBCASE("coincident hypotheses give pd = alpha") {
    for (double a : {0.01, 0.1, 0.5, 0.9}) {
      CHECK(sigeff::pd_generic(3.0, 3.0, 2.0, 2.0, a) ==
            doctest::Approx(a).epsilon(1e-12));
    }
  }
  SUBCASE("infinite separation saturates") {
    CHECK(sigeff::pd_generic(0.0, 1e9, 1.0, 1.0, 0.01) ==
          doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("pinned example") {
    const double pd = sigeff::pd_generic(10.0, 20.0, std::sqrt(20.0),
                                         std::sqrt(80.0), 0.1);
    const double want = 1.0 - sigeff::normal_cdf(
        0.5 * sigeff::normal_quantile(0.9) - 10.0 / std::sqrt(80.0));
    CHECK(pd == doctest::Approx(want).epsilon(1e-14));
    CHECK(pd == doctest::Approx(0.6834108660172).epsilon(1e-6));
  }
  SUBCASE("strictly increasing in the mean separation") {
    oracle::Rng rng(61);
    for (int i = 0; i < 50; ++i) {
      const double m0 = rng.uniform(-5.0, 5.0);
      const double s0 = rng.uniform(0.1, 4.0);
      const double s1 = rng.uniform(0.1, 4.0);
      const double a = rng.uniform(0.01, 0.99);
      const double m1 = m0 + rng.uniform(-3.0, 3.0);
      CHECK(sigeff::pd_generic(m0, m1 + 0.5, s0, s1, a) >
            sigeff::pd_generic(m0, m1, s0, s1, a));
    }
  }
  SUBCASE("dominates alpha for favorable moments") {
    // Needs alpha <= 1/2: the quantile flips sign past the median and the
    // sigma ratio then works against detection.
    oracle::Rng rng(62);
    for (int i = 0; i < 200; ++i) {
      const double m0 = rng.uniform(-5.0, 5.0);
      const double m1 = m0 + rng.uniform(0.0, 4.0);
      const double s0 = rng.uniform(0.1, 3.0);
      const double s1 = s0 + rng.uniform(0.0, 3.0);
      const double a = rng.uniform(0.001, 0.5);
      CHECK(sigeff::pd_generic(m0, m1, s0, s1, a) >= a - 1e-12);
    }
  }
  SUBCASE("rejects nonpositive sds") {
    CHECK_THROWS_AS(sigeff::pd_generic(0.0, 1.0, 0.0, 1.0, 0.1), sigeff::Error);
    CHECK_THROWS_AS(sigeff::pd_generic(0.0, 1.0, 1.0, -2.0, 0.1),
                    sigeff::Error);
  }
  SUBCASE("monte carlo cross-check at N=10") {
    // Moments (10, 20, sqrt 20, sqrt 80) are exactly the quadratic detector
    // with N=10, unit variances, mu1=0. The statistic is a chi-square with
    // 10 degrees of freedom, so the normal limit is ~0.04 off; the loose
    // tolerance covers that skew, not simulation noise.
    GaussianSignalModel m(0.0, 1.0, 0.0, 1.0);
    auto np = sigeff::np_random_signal_detector();
    const double tau = sigeff::raw_threshold_for_pf(np, m, 10, 0.1);
    const double pd_mc =
        mc_exceedance(np, m, 0.0, 2.0, 10, tau, 100000, 906090);
    CHECK(std::abs(pd_mc - 0.6834109) < 0.06);
  }
}

TEST_CASE("closed-form detection probability") {
  SUBCASE("two routes to the quadratic-detector pd agree") {
    // Fully written-out expression vs pd_generic on the four moments.
    oracle::Rng rng(88);
    auto np = sigeff::np_random_signal_detector();
    for (int i = 0; i < 100; ++i) {
      GaussianSignalModel m(0.0, rng.uniform(0.3, 3.0), rng.uniform(-1.0, 1.0),
                            rng.uniform(0.1, 4.0));
      const std::int64_t n = rng.uniform_int(1, 5000);
      const double a = rng.uniform(0.01, 0.99);

      const double nd = double(n);
      const double s0 = m.sigma0_sq;
      const double s2 = m.sigma0_sq + m.sigma1_sq;
      const double dl = sigeff::delta(m);
      const double sd1 =
          s2 * std::sqrt(2.0 * (nd + 2.0 * nd * m.mu1 * m.mu1) +
                         nd * dl * dl / s2);
      const double explicit_pd = 1.0 - sigeff::normal_cdf(
          s0 * std::sqrt(2.0 * nd + nd * dl * dl / s0) *
              sigeff::normal_quantile(1.0 - a) / sd1 -
          (s2 * (nd + nd * m.mu1 * m.mu1 + nd * m.mu1 * dl / s2) -
           nd * s0) / sd1);

      CHECK(sigeff::pd_closed_form(m, np, n, a) ==
            doctest::Approx(explicit_pd).epsilon(1e-12));
    }
  }
  SUBCASE("value at N=1000 sits in (alpha, 1) and matches simulation") {
    // Weak enough that the operating point stays interior: the deflection is
    // about one sigma, so pd lands near 0.83 instead of saturating.
    GaussianSignalModel m(0.0, 1.0, 0.02, 0.1);
    auto np = sigeff::np_random_signal_detector();
    const double pd = sigeff::pd_closed_form(m, np, 1000, 0.1);
    CHECK(pd > 0.1);
    CHECK(pd < 1.0);
    const double tau = sigeff::raw_threshold_for_pf(np, m, 1000, 0.1);
    const double pd_mc =
        mc_exceedance(np, m, 0.02, 1.1, 1000, tau, 100000, 17);
    CHECK(std::abs(pd_mc - pd) < 0.01);
  }
  SUBCASE("nondecreasing in N") {
    GaussianSignalModel m(0.0, 1.0, 0.05, 0.8);
    auto np = sigeff::np_random_signal_detector();
    double prev = 0.0;
    for (std::int64_t n :
         {10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000}) {
      const double pd = sigeff::pd_closed_form(m, np, n, 0.1);
      CHECK(pd >= prev);
      prev = pd;
    }
  }
}

TEST_CASE("raw threshold round trips for every built-in") {
  std::vector<DetectorSpec> dets{sigeff::np_random_signal_detector(),
                                 sigeff::energy_detector(),
                                 sigeff::linear_detector()};
  GaussianSignalModel m(0.0, 1.3, 0.4, 0.9);
  for (const auto& d : dets) {
    for (double a : {0.01, 0.1, 0.3, 0.5, 0.8}) {
      for (std::int64_t n : {std::int64_t(5), std::int64_t(400)}) {
        const double tau = sigeff::raw_threshold_for_pf(d, m, n, a);
        CHECK(sigeff::pf_at_raw_threshold(d, m, n, tau) ==
              doctest::Approx(a).epsilon(1e-10));
      }
    }
  }
  // For the quadratic detector the raw threshold is gamma'/sigma1^2.
  auto np = sigeff::np_random_signal_detector();
  const double tau = sigeff::raw_threshold_for_pf(np, m, 200, 0.05);
  CHECK(tau == doctest::Approx(sigeff::threshold_for_pf(m, 200, 0.05) /
                               m.sigma1_sq).epsilon(1e-12));
}

TEST_CASE("general-mu0 standardization constants") {
  SUBCASE("central case") {
    GaussianSignalModel m(0.0, 1.7, 0.0, 0.4);
    auto r = sigeff::general_mu0_moments(m, 50);
    CHECK(r.h0_mean == doctest::Approx(50.0));
    CHECK(r.h0_var == doctest::Approx(100.0));
    CHECK(r.h1_mean == doctest::Approx(50.0));
    CHECK(r.h1_var == doctest::Approx(100.0));
  }
  SUBCASE("hand evaluation") {
    GaussianSignalModel m(0.0, 1.0, 0.5, 1.0);  // delta = 1
    auto r = sigeff::general_mu0_moments(m, 10);
    CHECK(r.h1_mean == doctest::Approx(15.0).epsilon(1e-14));
  }
  SUBCASE("scaling consistency with the detector moment map") {
    auto np = sigeff::np_random_signal_detector();
    GaussianSignalModel m(0.0, 2.2, 0.3, 1.4);
    auto r = sigeff::general_mu0_moments(m, 123);
    CHECK(m.sigma0_sq * r.h0_mean ==
          doctest::Approx(np.mean_h0(123.0, m)).epsilon(1e-15));
    const double s2 = m.sigma0_sq + m.sigma1_sq;
    CHECK(s2 * r.h1_mean ==
          doctest::Approx(np.mean_h1(123.0, m)).epsilon(1e-15));
  }
  SUBCASE("general pd equals the mu0=0 closed form when mu0=0") {
    auto np = sigeff::np_random_signal_detector();
    oracle::Rng rng(91);
    for (int i = 0; i < 20; ++i) {
      GaussianSignalModel m(0.0, rng.uniform(0.3, 3.0), rng.uniform(-1.0, 1.0),
                            rng.uniform(0.2, 3.0));
      const double a = rng.uniform(0.02, 0.98);
      CHECK(sigeff::pd_np_general(m, 777, a) ==
            doctest::Approx(sigeff::pd_closed_form(m, np, 777, a))
                .epsilon(1e-12));
    }
  }
}
