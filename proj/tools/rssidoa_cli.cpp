#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rssidoa/crlb.hpp"
#include "rssidoa/error.hpp"
#include "rssidoa/estimator.hpp"
#include "rssidoa/harness.hpp"
#include "rssidoa/kernels/kernels.hpp"
#include "rssidoa/pattern.hpp"
#include "rssidoa/signal_model.hpp"

namespace fs = std::filesystem;
using namespace rssidoa;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  out << text;
}

PowerPattern read_pattern(const std::string& path) { return pattern_from_json(slurp(path)); }

// Pattern files named in a config are relative to the config's directory.
void anchor(PatternSource& src, const std::string& config_path) {
  if (src.path && fs::path(*src.path).is_relative()) {
    src.path = (fs::path(config_path).parent_path() / *src.path).lexically_normal().string();
  }
}

struct Common {
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RSSI maximum-likelihood direction finding"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--seed", common.seed, "Seed for every random draw (overrides config files)");
  app.add_option("--threads", common.threads, "Worker threads; results do not depend on it")->check(CLI::PositiveNumber);

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "Calibration CSV -> pattern JSON");
  std::string cal_in, cal_out;
  cal->add_option("input", cal_in, "CSV: angle_deg,sensor_index,trial_index,rssi")->required();
  cal->add_option("-o,--output", cal_out, "Pattern file (default stdout)");

  // synth-pattern
  auto* syn = app.add_subcommand("synth-pattern", "Cardioid-family pattern -> pattern JSON");
  SyntheticPatternSpec spec;
  double knot_start = 10.0, knot_step = 20.0;
  std::string syn_out, syn_cal;
  std::size_t syn_trials = 10;
  double syn_noise = 0.05;
  syn->add_option("-m,--sensors", spec.num_sensors, "Number of sensors");
  syn->add_option("-p,--exponent", spec.shape_exponent, "Shape exponent");
  syn->add_option("--boresights", spec.boresights_deg, "Boresight per sensor, degrees");
  syn->add_option("--knot-start", knot_start, "First knot angle");
  syn->add_option("--knot-step", knot_step, "Knot spacing");
  syn->add_option("-o,--output", syn_out, "Pattern file (default stdout)");
  syn->add_option("--calibration-csv", syn_cal, "Also write simulated calibration trials here");
  syn->add_option("--trials", syn_trials, "Trials per cell for --calibration-csv");
  syn->add_option("--trial-noise", syn_noise, "Relative jitter of each trial");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Draw one sample block -> CSV");
  std::string sim_pattern, sim_out;
  SignalParams sim_params{80.0, 100.0, 1.0};
  std::size_t sim_k = 64;
  sim->add_option("--pattern", sim_pattern, "Pattern file")->required();
  sim->add_option("--theta", sim_params.theta_deg, "Source azimuth, degrees");
  sim->add_option("--ps", sim_params.ps, "Signal power");
  sim->add_option("--sigma2", sim_params.sigma2, "Noise variance");
  sim->add_option("-k,--samples", sim_k, "Samples per block");
  sim->add_option("-o,--output", sim_out, "Block CSV (default stdout)");

  // estimate
  auto* est = app.add_subcommand("estimate", "Pattern + sample block -> DOA");
  std::string est_pattern, est_block;
  bool est_no_polish = false, est_curve = false;
  est->add_option("--pattern", est_pattern, "Pattern file")->required();
  est->add_option("block", est_block, "CSV: sensor_index,k,value")->required();
  est->add_flag("--no-polish", est_no_polish, "Stop after spline refinement");
  est->add_flag("--curve", est_curve, "Include the coarse objective curve");

  // campaign
  auto* camp = app.add_subcommand("campaign", "Config JSON -> campaign report");
  std::string camp_cfg, camp_out;
  camp->add_option("config", camp_cfg, "Campaign config file")->required();
  camp->add_option("-o,--output", camp_out, "Report file (default stdout)");

  // table
  auto* tab = app.add_subcommand("table", "Batch config -> table + structured results");
  std::string tab_cfg, tab_out;
  tab->add_option("config", tab_cfg, "Table config file")->required();
  tab->add_option("-o,--output", tab_out, "Structured results file");

  // crlb
  auto* cr = app.add_subcommand("crlb", "Pattern + params -> bound sweep (CSV)");
  std::string cr_pattern, cr_out;
  double cr_snr = 10.0, cr_sigma2 = 1.0, cr_step = 1.0;
  std::size_t cr_k = 64;
  cr->add_option("--pattern", cr_pattern, "Pattern file (default: 4-sensor cardioid)");
  cr->add_option("--snr-db", cr_snr, "Signal-to-noise ratio");
  cr->add_option("--sigma2", cr_sigma2, "Noise variance");
  cr->add_option("-k,--samples", cr_k, "Samples per block");
  cr->add_option("--step", cr_step, "Azimuth step, degrees")->check(CLI::PositiveNumber);
  cr->add_option("-o,--output", cr_out, "CSV file (default stdout)");

  app.add_subcommand("info", "Show the active SIMD kernel variant");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cal) {
      std::ifstream in(cal_in);
      if (!in) throw Error(ErrorKind::IoError, "cannot open " + cal_in);
      emit(pattern_to_json(build_pattern(read_calibration_csv(in))), cal_out);
    } else if (*syn) {
      const auto knots = knot_ring(knot_start, knot_step);
      emit(pattern_to_json(synth_pattern(spec, knots)), syn_out);
      if (!syn_cal.empty()) {
        std::ofstream out(syn_cal);
        if (!out) throw Error(ErrorKind::IoError, "cannot write " + syn_cal);
        write_calibration_csv(out, synth_calibration(spec, knots, syn_trials, syn_noise, common.seed.value_or(1)));
      }
    } else if (*sim) {
      const PowerPattern p = read_pattern(sim_pattern);
      std::ostringstream ss;
      write_sample_block_csv(ss, simulate_block(p, sim_params, sim_k, common.seed.value_or(1)));
      emit(ss.str(), sim_out);
    } else if (*est) {
      const PowerPattern p = read_pattern(est_pattern);
      std::ifstream in(est_block);
      if (!in) throw Error(ErrorKind::IoError, "cannot open " + est_block);
      const SampleBlock block = read_sample_block_csv(in);
      EstimatorOptions opts;
      opts.polish = !est_no_polish;
      const DoaEstimate e = estimate(block, p, opts);
      json j;
      j["theta_deg"] = std::round(e.theta_deg * 100.0) / 100.0;
      j["coarse_theta_deg"] = e.coarse_theta_deg;
      j["spline_theta_deg"] = std::round(e.spline_theta_deg * 100.0) / 100.0;
      j["ps_hat"] = e.ps_hat;
      j["sigma2_hat"] = e.sigma2_hat;
      j["objective"] = e.objective;
      j["degenerate"] = e.degenerate;
      j["polished"] = e.polished;
      if (est_curve) {
        const ObjectiveCurve c = estimate_coarse(average_power(block), p, block.k_per_block());
        j["curve"] = {{"angles_deg", c.angles_deg}, {"values", c.values}};
      }
      std::cout << j.dump(2) << "\n";
    } else if (*camp) {
      CampaignConfig c = campaign_config_from_json(slurp(camp_cfg));
      anchor(c.pattern, camp_cfg);
      if (common.seed) c.seed = *common.seed;
      emit(campaign_report_to_json(run_campaign(c, common.threads)), camp_out);
    } else if (*tab) {
      TableSpec t = table_spec_from_json(slurp(tab_cfg));
      for (auto& c : t.configs) {
        anchor(c.pattern, tab_cfg);
        if (common.seed) c.seed = *common.seed;
      }
      const TableResult r = run_table(t.configs, t.repeats, common.threads);
      std::cout << r.formatted;
      if (!tab_out.empty()) emit(table_result_to_json(r), tab_out);
    } else if (*cr) {
      const PowerPattern p = cr_pattern.empty() ? synth_pattern({}, default_knots()) : read_pattern(cr_pattern);
      std::vector<double> angles;
      for (double a = 0.0; a < 360.0 - 1e-9; a += cr_step) angles.push_back(a);
      const SignalParams tmpl{0.0, cr_sigma2 * std::pow(10.0, cr_snr / 10.0), cr_sigma2};
      std::ostringstream ss;
      ss << "theta_deg,fisher,crlb_deg2,crlb_std_deg\n";
      ss.precision(10);
      for (const auto& r : crlb_sweep(p, tmpl, cr_k, angles)) {
        ss << r.theta_deg << ',' << r.fisher_11 << ',';
        if (r.singular) {
          ss << "inf,inf\n";
        } else {
          ss << r.crlb << ',' << std::sqrt(r.crlb) << '\n';
        }
      }
      emit(ss.str(), cr_out);
    } else {
      std::cout << "kernels: " << kernels::to_string(kernels::active_isa()) << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
