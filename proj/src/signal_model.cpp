#include "signal_model.hpp"

#include <cmath>

#include "stats_core.hpp"

namespace sigeff {

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw Error::domain(std::string("GaussianSignalModel: ") + name +
                        " must be finite");
  }
}

}  // namespace

GaussianSignalModel::GaussianSignalModel(double mu0_, double sigma0_sq_,
                                         double mu1_, double sigma1_sq_)
    : mu0(mu0_), sigma0_sq(sigma0_sq_), mu1(mu1_), sigma1_sq(sigma1_sq_) {
  require_finite(mu0, "mu0");
  require_finite(sigma0_sq, "sigma0_sq");
  require_finite(mu1, "mu1");
  require_finite(sigma1_sq, "sigma1_sq");
  if (!(sigma0_sq > 0.0)) {
    throw Error::domain("GaussianSignalModel: sigma0_sq must be > 0");
  }
  if (!(sigma1_sq > 0.0)) {
    throw Error::domain("GaussianSignalModel: sigma1_sq must be > 0");
  }
}

double delta(const GaussianSignalModel& m) {
  return 2.0 * (m.sigma1_sq * m.mu0 + m.sigma0_sq * m.mu1) / m.sigma1_sq;
}

double test_statistic(std::span<const double> x, double delta_value) {
  if (x.empty()) {
    throw Error::domain("test_statistic requires a nonempty sample");
  }
  if (!std::isfinite(delta_value)) {
    throw Error::domain("test_statistic requires finite delta");
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double v : x) {
    sum += v;
    sum_sq += v * v;
  }
  return sum_sq + delta_value * sum;
}

namespace rng {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) {
  // Two finalizer rounds decouple nearby (seed, stream) pairs.
  return mix64(mix64(seed) ^ (stream * 0xd1342543de82ef95ULL + 1ULL));
}

double uniform_open(std::uint64_t key, std::uint64_t index) {
  // splitmix64 output for state key + index * golden ratio increment.
  const std::uint64_t bits = mix64(key + index * 0x9e3779b97f4a7c15ULL);
  // 53-bit mantissa, offset by half an ulp so 0 and 1 are never returned.
  return (double(bits >> 11) + 0.5) * 0x1.0p-53;
}

double normal_draw(std::uint64_t key, std::uint64_t index) {
  return normal_quantile(uniform_open(key, index));
}

}  // namespace rng

SampleBatch sample(const GaussianSignalModel& model, Hypothesis h,
                   std::int64_t n, std::uint64_t seed) {
  if (n < 1) throw Error::domain("sample requires n >= 1");
  const double mean = h == Hypothesis::h0 ? model.mu0 : model.mu0 + model.mu1;
  const double sd = std::sqrt(h == Hypothesis::h0
                                  ? model.sigma0_sq
                                  : model.sigma0_sq + model.sigma1_sq);
  const std::uint64_t key =
      rng::stream_key(seed, h == Hypothesis::h0 ? 0ULL : 1ULL);
  SampleBatch batch;
  batch.values.resize(static_cast<std::size_t>(n));
  batch.hypothesis = h;
  batch.seed = seed;
  for (std::int64_t i = 0; i < n; ++i) {
    batch.values[static_cast<std::size_t>(i)] =
        mean + sd * rng::normal_draw(key, static_cast<std::uint64_t>(i));
  }
  return batch;
}

}  // namespace sigeff
