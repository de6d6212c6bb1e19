#include "rssidoa/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rssidoa/angles.hpp"
#include "rssidoa/error.hpp"
#include "rssidoa/signal_model.hpp"

namespace rssidoa {

namespace {

double sorted_sum(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  double sum = 0.0;
  double comp = 0.0;
  for (double x : v) {
    const double t = sum + x;
    comp += std::fabs(sum) >= std::fabs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double circular_frechet_mean(std::span<const double> members) {
  std::vector<double> a(members.size());
  std::transform(members.begin(), members.end(), a.begin(), wrap_deg);
  std::sort(a.begin(), a.end());
  const std::size_t n = a.size();
  std::vector<double> tmp = a;
  const double base = sorted_sum(tmp);

  // Each way of cutting the circle between neighbours yields one candidate:
  // the arithmetic mean after lifting the first c points by 360.
  double best_angle = 0.0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < n; ++c) {
    const double candidate = wrap_deg((base + kFullTurnDeg * static_cast<double>(c)) /
                                      static_cast<double>(n));
    double cost = 0.0;
    for (double x : a) {
      const double d = circular_distance_deg(x, candidate);
      cost += d * d;
    }
    if (cost < best_cost || (cost == best_cost && candidate < best_angle)) {
      best_cost = cost;
      best_angle = candidate;
    }
  }
  return best_angle;
}

double total_cost(std::span<const double> x, const std::vector<std::size_t>& assign,
                  const std::vector<double>& centers, ClusterMetric metric) {
  double v = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) v += cluster_distance2(x[i], centers[assign[i]], metric);
  return v;
}

}  // namespace

double cluster_distance2(double a_deg, double b_deg, ClusterMetric metric) {
  const double d = metric == ClusterMetric::Circular ? circular_distance_deg(a_deg, b_deg)
                                                     : a_deg - b_deg;
  return d * d;
}

double cluster_center(std::span<const double> members_deg, ClusterMetric metric) {
  if (members_deg.empty()) throw Error(ErrorKind::TooFewPoints, "empty cluster has no centre");
  if (metric == ClusterMetric::Circular) return circular_frechet_mean(members_deg);
  std::vector<double> v(members_deg.begin(), members_deg.end());
  return sorted_sum(v) / static_cast<double>(v.size());
}

ClusterResult kmeans_doa(std::span<const double> estimates_deg, std::size_t k, std::uint64_t seed,
                         const ClusterOptions& options) {
  const std::size_t n = estimates_deg.size();
  if (k < 1) throw Error(ErrorKind::BadSpec, "k must be >= 1");
  if (n < k) throw Error(ErrorKind::TooFewPoints, "fewer estimates than clusters");
  const ClusterMetric metric = options.metric;

  std::vector<double> x(estimates_deg.begin(), estimates_deg.end());
  if (metric == ClusterMetric::Circular) {
    for (double& v : x) v = wrap_deg(v);
  }

  std::vector<double> distinct = x;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  ClusterResult res;
  res.collapsed = distinct.size() < k;
  const std::size_t k_eff = std::min(k, distinct.size());

  // Seeded greedy farthest-point initialization.
  std::vector<double> centers;
  centers.reserve(k_eff);
  {
    CounterRng rng(seed, 0xC1u);
    centers.push_back(distinct[rng.next_u64() % distinct.size()]);
    std::vector<double> nearest(distinct.size(), std::numeric_limits<double>::infinity());
    while (centers.size() < k_eff) {
      std::size_t pick = 0;
      double pick_d = -1.0;
      for (std::size_t i = 0; i < distinct.size(); ++i) {
        nearest[i] = std::min(nearest[i], cluster_distance2(distinct[i], centers.back(), metric));
        if (nearest[i] > pick_d) {
          pick_d = nearest[i];
          pick = i;
        }
      }
      centers.push_back(distinct[pick]);
    }
  }

  std::vector<std::size_t> assign(n, 0);
  auto reassign = [&] {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = cluster_distance2(x[i], centers[0], metric);
      for (std::size_t c = 1; c < centers.size(); ++c) {
        const double d = cluster_distance2(x[i], centers[c], metric);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (best != assign[i]) changed = true;
      assign[i] = best;
    }
    return changed;
  };

  std::vector<std::size_t> sizes(k_eff);
  auto count_sizes = [&] {
    std::fill(sizes.begin(), sizes.end(), 0);
    for (std::size_t a : assign) ++sizes[a];
  };

  // Empty clusters take the point that is farthest from its own centre.
  auto reseed_empty = [&] {
    bool moved = false;
    count_sizes();
    for (std::size_t c = 0; c < k_eff; ++c) {
      if (sizes[c] != 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[assign[i]] < 2) continue;
        const double d = cluster_distance2(x[i], centers[assign[i]], metric);
        if (d > far_d || (d == far_d && x[i] < x[far])) {
          far_d = d;
          far = i;
        }
      }
      if (far == n) break;
      --sizes[assign[far]];
      assign[far] = c;
      sizes[c] = 1;
      centers[c] = x[far];
      moved = true;
    }
    return moved;
  };

  reassign();
  reseed_empty();
  res.objective_history.push_back(total_cost(x, assign, centers, metric));

  std::vector<std::vector<double>> members(k_eff);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    for (auto& m : members) m.clear();
    for (std::size_t i = 0; i < n; ++i) members[assign[i]].push_back(x[i]);
    for (std::size_t c = 0; c < k_eff; ++c) {
      if (!members[c].empty()) centers[c] = cluster_center(members[c], metric);
    }
    bool changed = reassign();
    changed = reseed_empty() || changed;
    res.objective_history.push_back(total_cost(x, assign, centers, metric));
    res.iterations = iter + 1;
    if (!changed) {
      res.converged = true;
      break;
    }
  }

  count_sizes();
  res.assignments = std::move(assign);
  res.centers = std::move(centers);
  res.sizes = sizes;
  res.within_ss = res.objective_history.back();
  return res;
}

double final_doa(const ClusterResult& result) {
  if (result.centers.empty()) throw Error(ErrorKind::TooFewPoints, "no clusters");
  std::size_t best = 0;
  for (std::size_t c = 1; c < result.centers.size(); ++c) {
    if (result.sizes[c] > result.sizes[best] ||
        (result.sizes[c] == result.sizes[best] &&
         wrap_deg(result.centers[c]) < wrap_deg(result.centers[best]))) {
      best = c;
    }
  }
  return wrap_deg(result.centers[best]);
}

}  // namespace rssidoa
