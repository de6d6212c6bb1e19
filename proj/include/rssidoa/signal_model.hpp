#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "rssidoa/pattern.hpp"

namespace rssidoa {

/// The unknown parameter vector [theta, P_s, sigma^2].
struct SignalParams {
  double theta_deg = 0.0;
  double ps = 0.0;      ///< signal power arriving at the array, >= 0
  double sigma2 = 1.0;  ///< noise variance, > 0

  double snr() const { return ps / sigma2; }
};

/// K samples per sensor for one pulse, stored sensor-major.
class SampleBlock {
 public:
  SampleBlock() = default;
  SampleBlock(std::size_t num_sensors, std::size_t k_per_block);

  std::size_t num_sensors() const { return num_sensors_; }
  std::size_t k_per_block() const { return k_; }

  std::span<double> sensor(std::size_t m) { return {samples_.data() + m * k_, k_}; }
  std::span<const double> sensor(std::size_t m) const { return {samples_.data() + m * k_, k_}; }
  double& at(std::size_t m, std::size_t k) { return samples_[m * k_ + k]; }
  double at(std::size_t m, std::size_t k) const { return samples_[m * k_ + k]; }

  const std::vector<double>& data() const { return samples_; }

  /// Multiply every sample by c.
  void scale(double c);

  friend bool operator==(const SampleBlock&, const SampleBlock&) = default;

 private:
  std::size_t num_sensors_ = 0;
  std::size_t k_ = 0;
  std::vector<double> samples_;
};

/// Per-sensor average received power of one block.
struct PowerVector {
  std::vector<double> p_r;
  std::size_t k_per_block = 1;
};

/// Draw r_m(k) = a_m(theta) s(k) + n_m(k), a_m = sqrt(g_m(theta)).
///
/// s(k) defaults to the constant sqrt(ps). A caller-supplied `waveform` of
/// length k is rescaled so its mean square equals ps exactly. Noise for sensor
/// m comes from a counter-based stream keyed by (seed, m), so adding sensors
/// never changes the draws of existing ones.
SampleBlock simulate_block(const PowerPattern& pattern, const SignalParams& params, std::size_t k,
                           std::uint64_t seed, std::span<const double> waveform = {});

PowerVector average_power(const SampleBlock& block);

/// lambda_m = K g_m(theta) ps
double noncentrality(const PowerPattern& pattern, const SignalParams& params, std::size_t k,
                     std::size_t sensor);

/// Density of S = sum of K squared N(m_k, sigma2) samples, the scaled
/// noncentral chi-square with noncentrality lambda = sum m_k^2.
double chi2_pdf(double x, std::size_t k, double lambda, double sigma2);

struct GaussianMoments {
  double mu = 0.0;
  double var = 0.0;
};

/// Mean and variance of the average power P_{r,m}.
GaussianMoments gaussian_moments(const PowerPattern& pattern, const SignalParams& params,
                                 std::size_t k, std::size_t sensor);

double gaussian_pdf(double p, double mu, double var);

/// CSV with header `sensor_index,k,value`; every (sensor, k) cell exactly once.
SampleBlock read_sample_block_csv(std::istream& in);
void write_sample_block_csv(std::ostream& out, const SampleBlock& block);

/// Deterministic 64-bit stream: output i is a SplitMix64 finalization of
/// key + i * golden-gamma. Cheap to construct per (seed, sensor).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  /// Uniform in (0, 1).
  double next_open01();
  /// Standard normal via the Marsaglia polar method.
  double next_normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace rssidoa
