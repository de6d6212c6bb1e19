#include "rssidoa/signal_model.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>

#include "csv_util.hpp"
#include "rssidoa/angles.hpp"
#include "rssidoa/error.hpp"
#include "rssidoa/kernels/kernels.hpp"
#include "rssidoa/special.hpp"

namespace rssidoa {

namespace {

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void check_k(std::size_t k) {
  if (k < 1) throw Error(ErrorKind::InvalidK, "samples per block must be >= 1");
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix_finalize(splitmix_finalize(seed) ^ (stream * kGoldenGamma + 0x632BE59BD9B4E019ULL))) {}

std::uint64_t CounterRng::next_u64() { return splitmix_finalize(key_ + (++counter_) * kGoldenGamma); }

double CounterRng::next_open01() {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::next_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * next_open01() - 1.0;
    v = 2.0 * next_open01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

SampleBlock::SampleBlock(std::size_t num_sensors, std::size_t k_per_block)
    : num_sensors_(num_sensors), k_(k_per_block), samples_(num_sensors * k_per_block, 0.0) {
  check_k(k_per_block);
}

void SampleBlock::scale(double c) {
  for (double& v : samples_) v *= c;
}

SampleBlock simulate_block(const PowerPattern& pattern, const SignalParams& params, std::size_t k,
                           std::uint64_t seed, std::span<const double> waveform) {
  check_k(k);
  if (!(params.ps >= 0.0)) throw Error(ErrorKind::DomainError, "ps must be >= 0");
  if (!(params.sigma2 > 0.0)) throw Error(ErrorKind::DomainError, "sigma2 must be > 0");

  std::vector<double> s(k, std::sqrt(params.ps));
  if (!waveform.empty()) {
    if (waveform.size() != k) {
      throw Error(ErrorKind::DimensionMismatch, "waveform length must equal k");
    }
    const double ms = kernels::scalar::mean_square(waveform);
    if (!(ms > 0.0)) throw Error(ErrorKind::DomainError, "waveform has zero power");
    const double scale = std::sqrt(params.ps / ms);
    for (std::size_t i = 0; i < k; ++i) s[i] = waveform[i] * scale;
  }

  const std::size_t m_count = pattern.num_sensors();
  const double noise_sd = std::sqrt(params.sigma2);
  SampleBlock block(m_count, k);
  for (std::size_t m = 0; m < m_count; ++m) {
    const double a = std::sqrt(gain_at(pattern, m, params.theta_deg));
    CounterRng rng(seed, m);
    auto row = block.sensor(m);
    for (std::size_t i = 0; i < k; ++i) row[i] = a * s[i] + noise_sd * rng.next_normal();
  }
  return block;
}

PowerVector average_power(const SampleBlock& block) {
  PowerVector out;
  out.k_per_block = block.k_per_block();
  out.p_r.resize(block.num_sensors());
  for (std::size_t m = 0; m < block.num_sensors(); ++m) {
    out.p_r[m] = kernels::mean_square(block.sensor(m));
  }
  return out;
}

double noncentrality(const PowerPattern& pattern, const SignalParams& params, std::size_t k,
                     std::size_t sensor) {
  check_k(k);
  return static_cast<double>(k) * gain_at(pattern, sensor, params.theta_deg) * params.ps;
}

double chi2_pdf(double x, std::size_t k, double lambda, double sigma2) {
  if (!(x >= 0.0)) throw Error(ErrorKind::DomainError, "chi2_pdf needs x >= 0");
  if (!(sigma2 > 0.0)) throw Error(ErrorKind::DomainError, "chi2_pdf needs sigma2 > 0");
  if (!(lambda >= 0.0)) throw Error(ErrorKind::DomainError, "chi2_pdf needs lambda >= 0");
  check_k(k);

  const double kd = static_cast<double>(k);
  const double two_s2 = 2.0 * sigma2;

  if (x == 0.0) {
    if (k == 1) return std::numeric_limits<double>::infinity();
    if (k > 2) return 0.0;
    return std::exp(-lambda / two_s2) / two_s2;
  }

  if (lambda == 0.0) {
    const double half_k = 0.5 * kd;
    const double log_pdf = (half_k - 1.0) * std::log(x) - x / two_s2 - half_k * std::log(two_s2) -
                           std::lgamma(half_k);
    return std::exp(log_pdf);
  }

  const double nu = 0.5 * kd - 1.0;
  const double z = std::sqrt(lambda * x) / sigma2;
  const double log_pdf = -std::log(two_s2) + 0.5 * nu * (std::log(x) - std::log(lambda)) -
                         (lambda + x) / two_s2 + log_bessel_i(nu, z);
  return std::exp(log_pdf);
}

GaussianMoments gaussian_moments(const PowerPattern& pattern, const SignalParams& params,
                                 std::size_t k, std::size_t sensor) {
  check_k(k);
  const double g = gain_at(pattern, sensor, params.theta_deg);
  const double s2 = params.sigma2;
  const double gps = g * params.ps;
  return {s2 + gps, (2.0 / static_cast<double>(k)) * (s2 * s2 + 2.0 * s2 * gps)};
}

double gaussian_pdf(double p, double mu, double var) {
  if (!(var > 0.0)) throw Error(ErrorKind::DomainError, "gaussian_pdf needs var > 0");
  const double r = p - mu;
  return std::exp(-(r * r) / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

SampleBlock read_sample_block_csv(std::istream& in) {
  struct Cell {
    std::size_t m, k;
    double v;
    std::size_t line;
  };
  std::vector<Cell> cells;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t m_count = 0, k_count = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::blank(line)) continue;
    const auto fields = detail::split_fields(line);
    if (!header_seen) {
      if (fields.size() != 3 || fields[0] != "sensor_index" || fields[1] != "k" ||
          fields[2] != "value") {
        detail::parse_fail(line_no, "expected header sensor_index,k,value");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) detail::parse_fail(line_no, "expected 3 fields");
    Cell c{detail::parse_index(fields[0], line_no, "sensor_index"),
           detail::parse_index(fields[1], line_no, "k"),
           detail::parse_double(fields[2], line_no, "value"), line_no};
    if (!std::isfinite(c.v)) detail::parse_fail(line_no, "value must be finite");
    m_count = std::max(m_count, c.m + 1);
    k_count = std::max(k_count, c.k + 1);
    cells.push_back(c);
  }
  if (!header_seen) detail::parse_fail(line_no, "missing header");
  if (cells.empty()) detail::parse_fail(line_no, "no samples");

  SampleBlock block(m_count, k_count);
  std::vector<bool> seen(m_count * k_count, false);
  for (const Cell& c : cells) {
    const std::size_t idx = c.m * k_count + c.k;
    if (seen[idx]) detail::parse_fail(c.line, "duplicate sample for sensor/k");
    seen[idx] = true;
    block.at(c.m, c.k) = c.v;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      throw Error(ErrorKind::ParseError, "missing sample sensor " + std::to_string(i / k_count) +
                                             ", k " + std::to_string(i % k_count));
    }
  }
  return block;
}

void write_sample_block_csv(std::ostream& out, const SampleBlock& block) {
  out << "sensor_index,k,value\n";
  const auto old_precision = out.precision(17);
  for (std::size_t m = 0; m < block.num_sensors(); ++m) {
    for (std::size_t k = 0; k < block.k_per_block(); ++k) {
      out << m << ',' << k << ',' << block.at(m, k) << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace rssidoa
