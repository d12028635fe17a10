#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "error.hpp"

namespace sigeff {

enum class Hypothesis { h0, h1 };

// Two-hypothesis Gaussian observation model: under H0 each sample is
// N(mu0, sigma0_sq) noise; under H1 an independent N(mu1, sigma1_sq) signal
// amplitude is added, so samples are N(mu0 + mu1, sigma0_sq + sigma1_sq).
struct GaussianSignalModel {
  GaussianSignalModel(double mu0, double sigma0_sq, double mu1,
                      double sigma1_sq);

  double mu0;
  double sigma0_sq;
  double mu1;
  double sigma1_sq;
};

// Shift coefficient of the quadratic test statistic:
// delta = 2 (sigma1_sq mu0 + sigma0_sq mu1) / sigma1_sq.
double delta(const GaussianSignalModel& model);

// T(x) = sum x_i^2 + delta_value * sum x_i. Rejects empty input.
double test_statistic(std::span<const double> x, double delta_value);

struct SampleBatch {
  std::vector<double> values;
  Hypothesis hypothesis;
  std::uint64_t seed;
};

// Deterministic batch draw: sample i is produced by inverting the normal CDF
// at a counter-derived uniform keyed on (seed, hypothesis, i), so identical
// seeds reproduce identical batches and draws are order-independent.
SampleBatch sample(const GaussianSignalModel& model, Hypothesis h,
                   std::int64_t n, std::uint64_t seed);

// Counter-mode generator primitives shared with the Monte Carlo oracle.
// stream_key folds (seed, stream id) into an independent key; normal_draw
// maps (key, index) to a standard normal via the library quantile, with no
// sequential state anywhere.
namespace rng {

// Finalizer from splitmix64 (Steele, Lea, Flood 2014; public domain).
std::uint64_t mix64(std::uint64_t z);
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream);
double uniform_open(std::uint64_t key, std::uint64_t index);  // in (0, 1)
double normal_draw(std::uint64_t key, std::uint64_t index);

}  // namespace rng

}  // namespace sigeff
