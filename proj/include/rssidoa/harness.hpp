#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rssidoa/clustering.hpp"
#include "rssidoa/crlb.hpp"
#include "rssidoa/estimator.hpp"
#include "rssidoa/pattern.hpp"

namespace rssidoa {

/// Cardioid-family stand-in for a measured array pattern:
/// g_m(theta) = ((1 + cos(theta - boresight_m)) / 2)^p before normalization.
struct SyntheticPatternSpec {
  std::size_t num_sensors = 4;
  std::vector<double> boresights_deg;  ///< empty: evenly spaced from 0
  double shape_exponent = 1.0;
};

/// 10, 30, ..., 350: the 18-point calibration ring.
std::vector<double> default_knots();
/// start, start + step, ... below 360.
std::vector<double> knot_ring(double start_deg, double step_deg);

/// Boresights actually used (fills the evenly spaced default).
std::vector<double> resolved_boresights(const SyntheticPatternSpec& spec);

/// Closed-form gain before normalization.
double synthetic_gain(const SyntheticPatternSpec& spec, std::size_t sensor, double angle_deg);

PowerPattern synth_pattern(const SyntheticPatternSpec& spec, std::span<const double> knot_angles);

/// Calibration trials drawn around the closed form with multiplicative
/// Gaussian jitter of relative size `relative_noise` (clamped at zero).
std::vector<CalibrationRecord> synth_calibration(const SyntheticPatternSpec& spec,
                                                 std::span<const double> knot_angles,
                                                 std::size_t trials, double relative_noise,
                                                 std::uint64_t seed);

struct PatternSource {
  std::optional<std::string> path;  ///< pattern JSON file; overrides the synthetic spec
  SyntheticPatternSpec synthetic;
  std::vector<double> knots = default_knots();
};

PowerPattern load_pattern(const PatternSource& source);

struct CampaignConfig {
  PatternSource pattern;
  double true_theta_deg = 80.0;
  double snr_db = 20.0;
  double noise_variance = 1.0;  ///< sigma^2; ps = sigma^2 * 10^(snr/10)
  std::size_t k_per_block = 64;
  std::size_t num_pulses = 120;
  double detection_rate = 1.0;  ///< fraction of pulses captured, in (0, 1]
  double outlier_rate = 0.0;    ///< captured pulses that come from a random azimuth
  std::size_t kmeans_k = 4;
  ClusterMetric metric = ClusterMetric::Euclidean;
  EstimatorOptions estimator;
  std::uint64_t seed = 1;
};

/// ceil(N * detection_rate), guarded against representation error.
std::size_t effective_pulse_count(std::size_t num_pulses, double detection_rate);

struct ClusterSummary {
  std::vector<double> centers;
  std::vector<std::size_t> sizes;
  double within_ss = 0.0;
  bool collapsed = false;
};

struct CampaignReport {
  std::size_t captured_pulses = 0;
  std::vector<std::size_t> pulse_indices;   ///< which of the N pulses were captured
  std::vector<double> per_pulse_estimates;  ///< final single-pulse azimuths
  std::vector<double> per_pulse_coarse;     ///< grid-only azimuths
  std::vector<double> per_pulse_spline;     ///< spline-refined azimuths before polish
  double final_doa_deg = 0.0;               ///< largest-cluster centre
  double final_error_deg = 0.0;
  double coarse_final_doa_deg = 0.0;        ///< same clustering on grid-only azimuths
  double coarse_final_error_deg = 0.0;
  double unclustered_doa_deg = 0.0;         ///< centre of all estimates taken as one cluster
  double unclustered_error_deg = 0.0;
  double mean_abs_error_deg = 0.0;          ///< per-pulse, circular
  double coarse_mean_abs_error_deg = 0.0;
  double spline_mean_abs_error_deg = 0.0;
  double estimator_variance_deg2 = 0.0;     ///< variance of circular residuals
  double estimator_mse_deg2 = 0.0;          ///< mean squared circular residual
  std::optional<double> crlb_deg2;          ///< empty when the information is singular
  ClusterSummary cluster_summary;
};

/// Simulate, estimate, cluster and score one campaign. Deterministic given
/// config.seed; `threads` only changes wall time.
CampaignReport run_campaign(const CampaignConfig& config, unsigned threads = 1);

struct TableRow {
  CampaignConfig config;
  std::vector<CampaignReport> runs;  ///< one per repeat
  double avg_final_doa_deg = 0.0;    ///< circular mean of the runs' final DOAs
  double avg_final_error_deg = 0.0;
  double avg_coarse_final_error_deg = 0.0;
  double avg_mean_abs_error_deg = 0.0;
  double avg_coarse_mean_abs_error_deg = 0.0;
};

struct TableResult {
  std::vector<TableRow> rows;
  std::string formatted;
};

/// Seed of repeat r of a campaign whose base seed is `base`.
std::uint64_t repeat_seed(std::uint64_t base, std::size_t repeat);

/// Run each config `repeats` times (seeds from repeat_seed) and tabulate.
TableResult run_table(std::span<const CampaignConfig> configs, std::size_t repeats = 1,
                      unsigned threads = 1);

// Structured text I/O.
CampaignConfig campaign_config_from_json(const std::string& text);
std::string campaign_config_to_json(const CampaignConfig& config);
std::string campaign_report_to_json(const CampaignReport& report);

struct TableSpec {
  std::vector<CampaignConfig> configs;
  std::size_t repeats = 1;
};
/// {"defaults": {...}, "repeats": n, "campaigns": [{...}, ...]}; each campaign
/// entry overrides keys of "defaults".
TableSpec table_spec_from_json(const std::string& text);
std::string table_result_to_json(const TableResult& result);

}  // namespace rssidoa
