#include "rssidoa/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "parallel.hpp"
#include "rssidoa/angles.hpp"
#include "rssidoa/error.hpp"
#include "rssidoa/signal_model.hpp"

namespace rssidoa {

namespace {

using nlohmann::json;

// Stream tags keep the independent random decisions of a campaign apart.
constexpr std::uint64_t kThinStream = 0x7417'0000'0000'0000ULL;
constexpr std::uint64_t kPulseStream = 0x9015'0000'0000'0000ULL;
constexpr std::uint64_t kOutlierStream = 0x0071'0000'0000'0000ULL;
constexpr std::uint64_t kRepeatStream = 0x4E9E'0000'0000'0000ULL;
constexpr std::uint64_t kCalibrationStream = 0xCA11'0000'0000'0000ULL;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return CounterRng(seed, stream).next_u64();
}

double mean_of(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void validate(const CampaignConfig& c) {
  if (c.num_pulses < 1) throw Error(ErrorKind::BadConfig, "num_pulses must be >= 1");
  if (!(c.detection_rate > 0.0 && c.detection_rate <= 1.0)) {
    throw Error(ErrorKind::BadConfig, "detection_rate must lie in (0, 1]");
  }
  if (!(c.outlier_rate >= 0.0 && c.outlier_rate <= 1.0)) {
    throw Error(ErrorKind::BadConfig, "outlier_rate must lie in [0, 1]");
  }
  if (c.k_per_block < 1) throw Error(ErrorKind::BadConfig, "k_per_block must be >= 1");
  if (c.kmeans_k < 1) throw Error(ErrorKind::BadConfig, "kmeans_k must be >= 1");
  if (!(c.noise_variance > 0.0)) throw Error(ErrorKind::BadConfig, "noise_variance must be > 0");
  if (!std::isfinite(c.snr_db)) throw Error(ErrorKind::BadConfig, "snr_db must be finite");
}

}  // namespace

std::vector<double> knot_ring(double start_deg, double step_deg) {
  if (!(step_deg > 0.0)) throw Error(ErrorKind::BadSpec, "knot step must be > 0");
  std::vector<double> knots;
  for (double a = wrap_deg(start_deg); a < kFullTurnDeg; a += step_deg) knots.push_back(a);
  std::sort(knots.begin(), knots.end());
  return knots;
}

std::vector<double> default_knots() { return knot_ring(10.0, 20.0); }

std::vector<double> resolved_boresights(const SyntheticPatternSpec& spec) {
  if (!spec.boresights_deg.empty()) return spec.boresights_deg;
  std::vector<double> b(spec.num_sensors);
  for (std::size_t m = 0; m < spec.num_sensors; ++m) {
    b[m] = kFullTurnDeg * static_cast<double>(m) / static_cast<double>(spec.num_sensors);
  }
  return b;
}

double synthetic_gain(const SyntheticPatternSpec& spec, std::size_t sensor, double angle_deg) {
  const auto bs = resolved_boresights(spec);
  const double c = 0.5 * (1.0 + std::cos((angle_deg - bs.at(sensor)) * kDegToRad));
  return std::pow(std::max(0.0, c), spec.shape_exponent);
}

PowerPattern synth_pattern(const SyntheticPatternSpec& spec, std::span<const double> knot_angles) {
  if (spec.num_sensors < 2) throw Error(ErrorKind::BadSpec, "synthetic pattern needs M >= 2");
  if (!(spec.shape_exponent > 0.0)) throw Error(ErrorKind::BadSpec, "shape exponent must be > 0");
  if (!spec.boresights_deg.empty() && spec.boresights_deg.size() != spec.num_sensors) {
    throw Error(ErrorKind::BadSpec, "one boresight per sensor required");
  }
  if (knot_angles.size() < 4) throw Error(ErrorKind::BadSpec, "need at least 4 knot angles");

  const std::size_t m_count = spec.num_sensors;
  std::vector<double> gains(knot_angles.size() * m_count);
  double max_gain = 0.0;
  for (std::size_t i = 0; i < knot_angles.size(); ++i) {
    for (std::size_t m = 0; m < m_count; ++m) {
      gains[i * m_count + m] = synthetic_gain(spec, m, knot_angles[i]);
      max_gain = std::max(max_gain, gains[i * m_count + m]);
    }
  }
  if (max_gain <= 0.0) throw Error(ErrorKind::BadSpec, "synthetic pattern is zero at every knot");
  for (double& g : gains) g /= max_gain;
  return PowerPattern::from_normalized_gains({knot_angles.begin(), knot_angles.end()}, m_count,
                                             std::move(gains));
}

std::vector<CalibrationRecord> synth_calibration(const SyntheticPatternSpec& spec,
                                                 std::span<const double> knot_angles,
                                                 std::size_t trials, double relative_noise,
                                                 std::uint64_t seed) {
  std::vector<CalibrationRecord> out;
  out.reserve(knot_angles.size() * spec.num_sensors * trials);
  for (std::size_t i = 0; i < knot_angles.size(); ++i) {
    for (std::size_t m = 0; m < spec.num_sensors; ++m) {
      CounterRng rng(seed, kCalibrationStream + i * spec.num_sensors + m);
      const double g = synthetic_gain(spec, m, knot_angles[i]);
      for (std::size_t t = 0; t < trials; ++t) {
        const double v = g * (1.0 + relative_noise * rng.next_normal());
        out.push_back({knot_angles[i], m, t, std::max(0.0, v)});
      }
    }
  }
  return out;
}

PowerPattern load_pattern(const PatternSource& source) {
  if (source.path) {
    std::ifstream in(*source.path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open pattern file " + *source.path);
    std::stringstream ss;
    ss << in.rdbuf();
    return pattern_from_json(ss.str());
  }
  return synth_pattern(source.synthetic, source.knots);
}

std::size_t effective_pulse_count(std::size_t num_pulses, double detection_rate) {
  const double exact = static_cast<double>(num_pulses) * detection_rate;
  return static_cast<std::size_t>(std::ceil(exact - 1e-9 * std::max(1.0, exact)));
}

CampaignReport run_campaign(const CampaignConfig& config, unsigned threads) {
  validate(config);
  const PowerPattern pattern = load_pattern(config.pattern);
  const double truth = wrap_deg(config.true_theta_deg);
  const double ps = config.noise_variance * std::pow(10.0, config.snr_db / 10.0);

  CampaignReport rep;
  const std::size_t n_eff = effective_pulse_count(config.num_pulses, config.detection_rate);
  if (n_eff == 0) throw Error(ErrorKind::NoPulsesCaptured, "detection removed every pulse");

  // Which pulses were captured: a seeded uniform subset of exactly n_eff.
  std::vector<std::size_t> order(config.num_pulses);
  std::iota(order.begin(), order.end(), std::size_t{0});
  {
    CounterRng rng(config.seed, kThinStream);
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.next_u64() % i);
      std::swap(order[i - 1], order[j]);
    }
  }
  order.resize(n_eff);
  std::sort(order.begin(), order.end());
  rep.pulse_indices = order;
  rep.captured_pulses = n_eff;

  std::vector<DoaEstimate> estimates(n_eff);
  detail::parallel_for(n_eff, threads, [&](std::size_t slot) {
    const std::size_t pulse = order[slot];
    SignalParams params{truth, ps, config.noise_variance};
    if (config.outlier_rate > 0.0) {
      CounterRng rng(config.seed, kOutlierStream + pulse);
      if (rng.next_open01() < config.outlier_rate) params.theta_deg = wrap_deg(360.0 * rng.next_open01());
    }
    const SampleBlock block = simulate_block(pattern, params, config.k_per_block,
                                             derive_seed(config.seed, kPulseStream + pulse));
    estimates[slot] = estimate(block, pattern, config.estimator);
  });

  rep.per_pulse_estimates.resize(n_eff);
  rep.per_pulse_coarse.resize(n_eff);
  rep.per_pulse_spline.resize(n_eff);
  std::vector<double> abs_err(n_eff), coarse_err(n_eff), spline_err(n_eff), resid(n_eff);
  for (std::size_t i = 0; i < n_eff; ++i) {
    rep.per_pulse_estimates[i] = estimates[i].theta_deg;
    rep.per_pulse_coarse[i] = estimates[i].coarse_theta_deg;
    rep.per_pulse_spline[i] = estimates[i].spline_theta_deg;
    resid[i] = circular_difference_deg(estimates[i].theta_deg, truth);
    abs_err[i] = std::fabs(resid[i]);
    coarse_err[i] = circular_distance_deg(estimates[i].coarse_theta_deg, truth);
    spline_err[i] = circular_distance_deg(estimates[i].spline_theta_deg, truth);
  }
  rep.mean_abs_error_deg = mean_of(abs_err);
  rep.coarse_mean_abs_error_deg = mean_of(coarse_err);
  rep.spline_mean_abs_error_deg = mean_of(spline_err);

  const double mean_resid = mean_of(resid);
  double ss = 0.0, sq = 0.0;
  for (double r : resid) {
    ss += (r - mean_resid) * (r - mean_resid);
    sq += r * r;
  }
  rep.estimator_variance_deg2 = n_eff > 1 ? ss / static_cast<double>(n_eff - 1) : 0.0;
  rep.estimator_mse_deg2 = sq / static_cast<double>(n_eff);

  const std::size_t k = std::min(config.kmeans_k, n_eff);
  const ClusterOptions copts{config.metric, 100};
  const ClusterResult clusters = kmeans_doa(rep.per_pulse_estimates, k, config.seed, copts);
  rep.final_doa_deg = final_doa(clusters);
  rep.final_error_deg = circular_distance_deg(rep.final_doa_deg, truth);
  rep.cluster_summary = {clusters.centers, clusters.sizes, clusters.within_ss, clusters.collapsed};

  const ClusterResult coarse_clusters = kmeans_doa(rep.per_pulse_coarse, k, config.seed, copts);
  rep.coarse_final_doa_deg = final_doa(coarse_clusters);
  rep.coarse_final_error_deg = circular_distance_deg(rep.coarse_final_doa_deg, truth);

  rep.unclustered_doa_deg = wrap_deg(cluster_center(rep.per_pulse_estimates, config.metric));
  rep.unclustered_error_deg = circular_distance_deg(rep.unclustered_doa_deg, truth);

  const double angle[] = {truth};
  const auto bound = crlb_sweep(pattern, {truth, ps, config.noise_variance}, config.k_per_block, angle);
  if (!bound.front().singular) rep.crlb_deg2 = bound.front().crlb;
  return rep;
}

std::uint64_t repeat_seed(std::uint64_t base, std::size_t repeat) {
  return repeat == 0 ? base : derive_seed(base, kRepeatStream + repeat);
}

TableResult run_table(std::span<const CampaignConfig> configs, std::size_t repeats,
                      unsigned threads) {
  if (configs.empty()) throw Error(ErrorKind::BadConfig, "table needs at least one campaign");
  if (repeats < 1) throw Error(ErrorKind::BadConfig, "repeats must be >= 1");

  TableResult out;
  for (const CampaignConfig& base : configs) {
    TableRow row;
    row.config = base;
    std::vector<double> finals;
    for (std::size_t r = 0; r < repeats; ++r) {
      CampaignConfig c = base;
      c.seed = repeat_seed(base.seed, r);
      row.runs.push_back(run_campaign(c, threads));
      const CampaignReport& rep = row.runs.back();
      finals.push_back(rep.final_doa_deg);
      row.avg_final_error_deg += rep.final_error_deg;
      row.avg_coarse_final_error_deg += rep.coarse_final_error_deg;
      row.avg_mean_abs_error_deg += rep.mean_abs_error_deg;
      row.avg_coarse_mean_abs_error_deg += rep.coarse_mean_abs_error_deg;
    }
    const double n = static_cast<double>(repeats);
    row.avg_final_error_deg /= n;
    row.avg_coarse_final_error_deg /= n;
    row.avg_mean_abs_error_deg /= n;
    row.avg_coarse_mean_abs_error_deg /= n;
    row.avg_final_doa_deg = cluster_center(finals, ClusterMetric::Circular);
    out.rows.push_back(std::move(row));
  }

  std::ostringstream t;
  char line[256];
  std::snprintf(line, sizeof line, "%8s %7s %7s %6s %9s %10s %10s %10s %10s\n", "Azimuth", "Sensors",
                "SNR_dB", "Pulses", "DOA", "Err", "Err_grid", "PulseErr", "PulseErr_g");
  t << line;
  for (const TableRow& row : out.rows) {
    const auto& c = row.config;
    std::snprintf(line, sizeof line, "%8s %7zu %7s %6zu %9s %10s %10s %10s %10s\n",
                  fixed2(c.true_theta_deg).c_str(), load_pattern(c.pattern).num_sensors(),
                  fixed2(c.snr_db).c_str(), row.runs.front().captured_pulses,
                  fixed2(row.avg_final_doa_deg).c_str(), fixed2(row.avg_final_error_deg).c_str(),
                  fixed2(row.avg_coarse_final_error_deg).c_str(),
                  fixed2(row.avg_mean_abs_error_deg).c_str(),
                  fixed2(row.avg_coarse_mean_abs_error_deg).c_str());
    t << line;
  }
  out.formatted = t.str();
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

const char* metric_name(ClusterMetric m) {
  return m == ClusterMetric::Circular ? "circular" : "euclidean";
}

json pattern_source_to_json(const PatternSource& p) {
  json j;
  if (p.path) j["file"] = *p.path;
  json s;
  s["num_sensors"] = p.synthetic.num_sensors;
  s["boresights_deg"] = p.synthetic.boresights_deg;
  s["shape_exponent"] = p.synthetic.shape_exponent;
  j["synthetic"] = s;
  j["knots_deg"] = p.knots;
  return j;
}

template <class T>
void read_key(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return it.key() == k; })) {
      throw Error(ErrorKind::BadConfig, std::string("unknown key '") + it.key() + "' in " + where);
    }
  }
}

PatternSource pattern_source_from_json(const json& j) {
  reject_unknown(j, {"file", "synthetic", "knots_deg"}, "pattern");
  PatternSource p;
  if (j.contains("file")) p.path = j.at("file").get<std::string>();
  if (j.contains("synthetic")) {
    const json& s = j.at("synthetic");
    reject_unknown(s, {"num_sensors", "boresights_deg", "shape_exponent"}, "pattern.synthetic");
    read_key(s, "num_sensors", p.synthetic.num_sensors);
    read_key(s, "boresights_deg", p.synthetic.boresights_deg);
    read_key(s, "shape_exponent", p.synthetic.shape_exponent);
  }
  read_key(j, "knots_deg", p.knots);
  return p;
}

CampaignConfig campaign_from_json_value(const json& j) {
  reject_unknown(j,
                 {"pattern", "true_theta_deg", "snr_db", "noise_variance", "k_per_block",
                  "num_pulses", "detection_rate", "outlier_rate", "kmeans_k", "metric", "polish",
                  "shared_nuisance", "seed"},
                 "campaign");
  CampaignConfig c;
  if (j.contains("pattern")) c.pattern = pattern_source_from_json(j.at("pattern"));
  read_key(j, "true_theta_deg", c.true_theta_deg);
  read_key(j, "snr_db", c.snr_db);
  read_key(j, "noise_variance", c.noise_variance);
  read_key(j, "k_per_block", c.k_per_block);
  read_key(j, "num_pulses", c.num_pulses);
  read_key(j, "detection_rate", c.detection_rate);
  read_key(j, "outlier_rate", c.outlier_rate);
  read_key(j, "kmeans_k", c.kmeans_k);
  read_key(j, "polish", c.estimator.polish);
  read_key(j, "shared_nuisance", c.estimator.shared_nuisance);
  read_key(j, "seed", c.seed);
  if (j.contains("metric")) {
    const auto m = j.at("metric").get<std::string>();
    if (m == "euclidean") {
      c.metric = ClusterMetric::Euclidean;
    } else if (m == "circular") {
      c.metric = ClusterMetric::Circular;
    } else {
      throw Error(ErrorKind::BadConfig, "metric must be 'euclidean' or 'circular'");
    }
  }
  validate(c);
  return c;
}

json campaign_to_json_value(const CampaignConfig& c) {
  json j;
  j["pattern"] = pattern_source_to_json(c.pattern);
  j["true_theta_deg"] = c.true_theta_deg;
  j["snr_db"] = c.snr_db;
  j["noise_variance"] = c.noise_variance;
  j["k_per_block"] = c.k_per_block;
  j["num_pulses"] = c.num_pulses;
  j["detection_rate"] = c.detection_rate;
  j["outlier_rate"] = c.outlier_rate;
  j["kmeans_k"] = c.kmeans_k;
  j["metric"] = metric_name(c.metric);
  j["polish"] = c.estimator.polish;
  j["shared_nuisance"] = c.estimator.shared_nuisance;
  j["seed"] = c.seed;
  return j;
}

// Angles are reported to 0.01 degree.
double round2(double v) { return std::round(v * 100.0) / 100.0; }

std::vector<double> round2(std::span<const double> v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return round2(x); });
  return out;
}

json report_to_json_value(const CampaignReport& r) {
  json j;
  j["captured_pulses"] = r.captured_pulses;
  j["pulse_indices"] = r.pulse_indices;
  j["per_pulse_estimates_deg"] = round2(r.per_pulse_estimates);
  j["per_pulse_coarse_deg"] = round2(r.per_pulse_coarse);
  j["per_pulse_spline_deg"] = round2(r.per_pulse_spline);
  j["final_doa_deg"] = round2(r.final_doa_deg);
  j["final_error_deg"] = round2(r.final_error_deg);
  j["coarse_final_doa_deg"] = round2(r.coarse_final_doa_deg);
  j["coarse_final_error_deg"] = round2(r.coarse_final_error_deg);
  j["unclustered_doa_deg"] = round2(r.unclustered_doa_deg);
  j["unclustered_error_deg"] = round2(r.unclustered_error_deg);
  j["mean_abs_error_deg"] = round2(r.mean_abs_error_deg);
  j["coarse_mean_abs_error_deg"] = round2(r.coarse_mean_abs_error_deg);
  j["spline_mean_abs_error_deg"] = round2(r.spline_mean_abs_error_deg);
  j["estimator_variance_deg2"] = r.estimator_variance_deg2;
  j["estimator_mse_deg2"] = r.estimator_mse_deg2;
  j["crlb_deg2"] = r.crlb_deg2 ? json(*r.crlb_deg2) : json(nullptr);
  json cs;
  cs["centers_deg"] = round2(r.cluster_summary.centers);
  cs["sizes"] = r.cluster_summary.sizes;
  cs["within_ss"] = r.cluster_summary.within_ss;
  cs["collapsed"] = r.cluster_summary.collapsed;
  j["cluster_summary"] = cs;
  return j;
}

json parse_or_throw(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

}  // namespace

CampaignConfig campaign_config_from_json(const std::string& text) {
  try {
    return campaign_from_json_value(parse_or_throw(text));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BadConfig, e.what());
  }
}

std::string campaign_config_to_json(const CampaignConfig& config) {
  return campaign_to_json_value(config).dump(2) + "\n";
}

std::string campaign_report_to_json(const CampaignReport& report) {
  return report_to_json_value(report).dump(2) + "\n";
}

TableSpec table_spec_from_json(const std::string& text) {
  const json doc = parse_or_throw(text);
  try {
    reject_unknown(doc, {"defaults", "repeats", "campaigns"}, "table");
    TableSpec spec;
    read_key(doc, "repeats", spec.repeats);
    const json defaults = doc.contains("defaults") ? doc.at("defaults") : json::object();
    if (!doc.contains("campaigns") || !doc.at("campaigns").is_array() ||
        doc.at("campaigns").empty()) {
      throw Error(ErrorKind::BadConfig, "table needs a non-empty 'campaigns' array");
    }
    for (const json& entry : doc.at("campaigns")) {
      json merged = defaults;
      merged.merge_patch(entry);
      spec.configs.push_back(campaign_from_json_value(merged));
    }
    return spec;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BadConfig, e.what());
  }
}

std::string table_result_to_json(const TableResult& result) {
  json rows = json::array();
  for (const TableRow& row : result.rows) {
    json r;
    r["config"] = campaign_to_json_value(row.config);
    r["avg_final_doa_deg"] = round2(row.avg_final_doa_deg);
    r["avg_final_error_deg"] = round2(row.avg_final_error_deg);
    r["avg_coarse_final_error_deg"] = round2(row.avg_coarse_final_error_deg);
    r["avg_mean_abs_error_deg"] = round2(row.avg_mean_abs_error_deg);
    r["avg_coarse_mean_abs_error_deg"] = round2(row.avg_coarse_mean_abs_error_deg);
    json runs = json::array();
    for (const auto& rep : row.runs) runs.push_back(report_to_json_value(rep));
    r["runs"] = runs;
    rows.push_back(r);
  }
  json doc;
  doc["rows"] = rows;
  return doc.dump(2) + "\n";
}

}  // namespace rssidoa
