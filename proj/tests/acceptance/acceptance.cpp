// One line per acceptance criterion: PASS/FAIL, the measured quantity, and
// the wall time against its budget. Exit status is the number of failures.

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "rssidoa/angles.hpp"
#include "rssidoa/clustering.hpp"
#include "rssidoa/crlb.hpp"
#include "rssidoa/estimator.hpp"
#include "rssidoa/harness.hpp"
#include "rssidoa/periodic_spline.hpp"
#include "rssidoa/signal_model.hpp"

using namespace rssidoa;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

const PowerPattern& cardioid() {
  static const PowerPattern p = synth_pattern({}, default_knots());
  return p;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome noiseless_recovery() {
  double worst = 0.0;
  for (double a : default_knots()) {
    const auto b = simulate_block(cardioid(), {a, 1.0, 1e-30}, 64, 11);
    worst = std::max(worst, circular_distance_deg(estimate(b, cardioid()).theta_deg, a));
  }
  return {worst <= 0.01, fmt("worst knot error %.2e deg (limit 0.01)", worst)};
}

struct TableOneBatch {
  std::vector<double> azimuths{40.0, 80.0, 150.0, 340.0};
  std::vector<double> err, coarse_err;
};

const TableOneBatch& table_one() {
  static const TableOneBatch batch = [] {
    TableOneBatch b;
    for (double az : b.azimuths) {
      double e = 0.0, ec = 0.0;
      for (std::uint64_t s = 1; s <= 10; ++s) {
        CampaignConfig c;
        c.true_theta_deg = az;
        c.snr_db = 20.0;
        c.k_per_block = 64;
        c.num_pulses = 120;
        c.kmeans_k = 4;
        c.seed = s;
        const CampaignReport r = run_campaign(c, worker_count());
        e += r.final_error_deg;
        ec += r.coarse_final_error_deg;
      }
      b.err.push_back(e / 10.0);
      b.coarse_err.push_back(ec / 10.0);
    }
    return b;
  }();
  return batch;
}

Outcome table_one_accuracy() {
  const auto& b = table_one();
  Outcome o;
  for (std::size_t i = 0; i < b.azimuths.size(); ++i) {
    o.pass = o.pass && b.err[i] <= 6.0;
    o.detail += fmt("%g:%.2f ", b.azimuths[i], b.err[i]);
  }
  o.detail += "deg (limit 6)";
  return o;
}

Outcome interpolation_benefit() {
  const auto& b = table_one();
  const auto knots = default_knots();
  Outcome o;
  for (std::size_t i = 0; i < b.azimuths.size(); ++i) {
    if (std::find(knots.begin(), knots.end(), b.azimuths[i]) != knots.end()) continue;
    o.pass = o.pass && b.err[i] <= b.coarse_err[i];
    o.detail += fmt("%g: %.2f<=%.2f ", b.azimuths[i], b.err[i], b.coarse_err[i]);
  }
  return o;
}

Outcome chi2_quadrature() {
  using Q = boost::math::quadrature::gauss_kronrod<double, 61>;
  double worst_mass = 0.0, worst_mean = 0.0;
  for (std::size_t k : {2u, 8u, 32u})
    for (double lam : {0.0, 5.0, 50.0})
      for (double s2 : {1.0, 4.0}) {
        auto f = [&](double x) { return chi2_pdf(x, k, lam, s2); };
        const double want = k * s2 + lam;
        const double hi = want + 60.0 * s2 * std::sqrt(2.0 * k + 4.0 * lam / s2) + 60.0 * s2;
        const double mass = Q::integrate(f, 0.0, hi, 15, 1e-13);
        const double mean = Q::integrate([&](double x) { return x * f(x); }, 0.0, hi, 15, 1e-13);
        worst_mass = std::max(worst_mass, std::fabs(mass - 1.0));
        worst_mean = std::max(worst_mean, std::fabs(mean - want) / want);
      }
  return {worst_mass <= 1e-6 && worst_mean <= 1e-6,
          fmt("18 cases, max |mass-1| %.1e, max mean rel err %.1e", worst_mass, worst_mean)};
}

Outcome moment_matching() {
  const std::pair<std::size_t, double> combos[] = {{8, 0.0}, {8, 10.0}, {32, 5.0}, {64, 20.0}, {128, 10.0}, {256, 30.0}};
  const std::size_t n = 10000;
  double worst = 0.0;
  for (auto [k, snr] : combos) {
    const SignalParams sp{70.0, std::pow(10.0, snr / 10.0), 1.0};
    std::vector<std::vector<double>> draws(4, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const auto pv = average_power(simulate_block(cardioid(), sp, k, 900000 + i));
      for (std::size_t m = 0; m < 4; ++m) draws[m][i] = pv.p_r[m];
    }
    for (std::size_t m = 0; m < 4; ++m) {
      const auto gm = gaussian_moments(cardioid(), sp, k, m);
      double mean = 0.0;
      for (double x : draws[m]) mean += x;
      mean /= n;
      double c2 = 0.0, c4 = 0.0;
      for (double x : draws[m]) {
        const double d = x - mean;
        c2 += d * d;
        c4 += d * d * d * d;
      }
      const double var = c2 / (n - 1);
      c4 /= n;
      const double se_mean = std::sqrt(var / n);
      const double se_var = std::sqrt(std::max(c4 - var * var, 0.0) / n);
      worst = std::max({worst, std::fabs(mean - gm.mu) / se_mean, std::fabs(var - gm.var) / se_var});
    }
  }
  return {worst <= 5.0, fmt("6 (K, SNR) combos x 4 sensors, worst deviation %.2f SE (limit 5)", worst)};
}

Outcome spline_contracts() {
  const std::vector<double> knots{3.0, 20.0, 61.0, 95.0, 140.0, 200.0, 251.0, 300.0, 341.0};
  std::vector<double> v;
  for (double k : knots) v.push_back(1.0 + std::sin(k * kDegToRad) + 0.2 * std::cos(2.0 * k * kDegToRad));
  const PeriodicCubicSpline s(knots, v);
  double knot_err = 0.0;
  for (std::size_t i = 0; i < knots.size(); ++i) knot_err = std::max(knot_err, std::fabs(s.value(knots[i]) - v[i]));
  const auto& last = s.pieces().back();
  const double w = s.width(knots.size() - 1);
  const double wrap_err = std::max(std::fabs(last.value(w) - v.front()), std::fabs(last.derivative(w) - s.pieces().front().b));
  // cubic reproduction: refit the spline from samples at a knot superset
  std::vector<double> fine;
  for (std::size_t j = 0; j < knots.size(); ++j) {
    fine.push_back(knots[j]);
    fine.push_back(std::fmod(knots[j] + 0.37 * s.width(j), 360.0));
  }
  std::sort(fine.begin(), fine.end());
  std::vector<double> fv;
  for (double x : fine) fv.push_back(s.value(x));
  const PeriodicCubicSpline refit(fine, fv);
  double repro = 0.0;
  for (double x = 0.0; x < 360.0; x += 0.1) repro = std::max(repro, std::fabs(refit.value(x) - s.value(x)));
  return {knot_err <= 1e-9 && wrap_err <= 1e-9 && repro <= 1e-9,
          fmt("knots %.1e, wrap C1 %.1e, cubic reproduction %.1e (limit 1e-9)", knot_err, wrap_err, repro)};
}

Outcome profiler_oracle() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    CounterRng r(seed, 0xAC7);
    const SignalParams sp{360.0 * r.next_open01(), std::pow(10.0, 3.0 * r.next_open01() - 0.5), std::pow(10.0, 2.0 * r.next_open01() - 1.0)};
    const double probe = 360.0 * r.next_open01();
    const std::size_t k = 16 << (seed % 3);
    const auto pv = average_power(simulate_block(cardioid(), sp, k, seed));
    const ProfileResult got = profile_objective(pv, cardioid(), k, probe);
    std::vector<double> g(4);
    cardioid().gains_at(probe, g);
    const double mx = *std::max_element(pv.p_r.begin(), pv.p_r.end());
    const auto ref = oracle::nested_grid(pv.p_r, g, double(k), 1e-5 * mx, 1e3 * mx, 200);
    worst = std::max(worst, std::fabs(got.value - ref.value) / std::max(1.0, std::fabs(ref.value)));
  }
  return {worst <= 1e-3, fmt("50 instances, worst relative gap %.2e (limit 1e-3)", worst)};
}

Outcome crlb_consistency() {
  Outcome o;
  const PowerPattern& p = cardioid();
  const double az[] = {40.0, 80.0, 150.0};
  // Expected curvature of the negative log-likelihood in theta at the truth.
  for (double a : az) {
    const SignalParams sp{a, 10.0, 1.0};
    const double fisher = fisher_theta(p, sp, 64).fisher_11;
    const double h = 0.05;
    SignalParams lo = sp, hi = sp;
    lo.theta_deg -= h;
    hi.theta_deg += h;
    double curv = 0.0;
    const std::size_t n = 20000;
    for (std::size_t i = 0; i < n; ++i) {
      const auto pv = average_power(simulate_block(p, sp, 64, 500000 + i));
      curv += (neg_log_likelihood(pv, p, hi, 64) - 2.0 * neg_log_likelihood(pv, p, sp, 64) +
               neg_log_likelihood(pv, p, lo, 64)) / (h * h);
    }
    curv /= n;
    const double rel = std::fabs(curv - fisher) / fisher;
    o.pass = o.pass && rel <= 0.10;
    o.detail += fmt("I(%g)=%.4g mc=%.4g; ", a, fisher, curv);
  }
  for (double a : az) {
    const double c16 = fisher_theta(p, {a, 10.0, 1.0}, 16).crlb, c64 = fisher_theta(p, {a, 10.0, 1.0}, 64).crlb,
                 c256 = fisher_theta(p, {a, 10.0, 1.0}, 256).crlb;
    o.pass = o.pass && c16 > c64 && c64 > c256;
  }
  o.detail += "K-monotone; var/CRLB at 20 dB:";
  for (double a : az) {
    CampaignConfig c;
    c.true_theta_deg = a;
    c.snr_db = 20.0;
    c.num_pulses = 500;
    c.seed = 2024;
    const CampaignReport r = run_campaign(c, worker_count());
    const double ratio = r.crlb_deg2 ? r.estimator_variance_deg2 / *r.crlb_deg2 : 0.0;
    o.pass = o.pass && ratio >= 0.2 && ratio <= 20.0;
    o.detail += fmt(" %g:%.2f", a, ratio);
  }
  return o;
}

Outcome determinism() {
  CampaignConfig c;
  c.true_theta_deg = 213.0;
  c.num_pulses = 60;
  c.detection_rate = 0.9;
  c.outlier_rate = 0.1;
  c.seed = 77;
  const std::string ref = campaign_report_to_json(run_campaign(c, 1));
  bool same = ref == campaign_report_to_json(run_campaign(c, 1));
  for (unsigned t : {2u, 4u, 8u}) same = same && ref == campaign_report_to_json(run_campaign(c, t));
  double drift = 0.0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const auto b = simulate_block(cardioid(), {37.0 * s, 100.0, 1.0}, 64, s);
    const double base = estimate(b, cardioid()).theta_deg;
    for (double k : {1e-3, 1.0, 1e3}) {
      auto sc = b;
      sc.scale(k);
      drift = std::max(drift, circular_distance_deg(estimate(sc, cardioid()).theta_deg, base));
    }
  }
  return {same && drift <= 1e-9, fmt("outputs %s across runs/threads {1,2,4,8}; max scale drift %.1e deg",
                                     same ? "byte-identical" : "DIFFER", drift)};
}

Outcome kmeans_properties() {
  bool monotone = true, rule = true;
  for (std::uint64_t s = 0; s < 100; ++s) {
    std::mt19937_64 gen(s);
    std::uniform_real_distribution<double> u(0.0, 360.0);
    std::normal_distribution<double> nz(0.0, 6.0);
    std::vector<double> v(80);
    const double c[] = {u(gen), u(gen), u(gen)};
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = wrap_deg(c[i % 3] + nz(gen));
    if (s % 5 == 0) for (std::size_t i = 0; i < 20; ++i) v[i] = u(gen);
    const ClusterMetric metric = s % 2 ? ClusterMetric::Circular : ClusterMetric::Euclidean;
    const ClusterResult r = kmeans_doa(v, 4, s, {metric, 100});
    for (std::size_t i = 1; i < r.objective_history.size(); ++i)
      monotone = monotone && r.objective_history[i] <= r.objective_history[i - 1] * (1.0 + 1e-12) + 1e-12;
    std::vector<std::size_t> counts(r.centers.size(), 0);
    for (auto a : r.assignments) ++counts[a];
    std::size_t best = 0;
    for (std::size_t j = 1; j < counts.size(); ++j)
      if (counts[j] > counts[best] || (counts[j] == counts[best] && r.centers[j] < r.centers[best])) best = j;
    rule = rule && final_doa(r) == r.centers[best];
  }
  return {monotone && rule, fmt("100 instances: objective %s, largest-cluster rule %s", monotone ? "non-increasing" : "INCREASED",
                                rule ? "matches brute force" : "MISMATCH")};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "noiseless exact recovery", 10, noiseless_recovery},
      {2, "four-azimuth accuracy", 120, table_one_accuracy},
      {3, "interpolation benefit", 120, interpolation_benefit},
      {4, "chi-square normalization and mean", 5, chi2_quadrature},
      {5, "moment matching", 30, moment_matching},
      {6, "spline contracts", 1, spline_contracts},
      {7, "profiler oracle", 60, profiler_oracle},
      {8, "CRLB consistency", 180, crlb_consistency},
      {9, "determinism and scale invariance", 60, determinism},
      {10, "k-means properties", 30, kmeans_properties},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = o.pass && dt <= c.budget_s;
    failures += !ok;
    std::printf("[%s] %2d %-34s %s (%.1fs / %.0fs)\n", ok ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), dt,
                c.budget_s);
    std::fflush(stdout);
  }
  return failures;
}
