#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rssidoa {

enum class ClusterMetric {
  /// Squared difference of raw angle values, centres by arithmetic mean.
  Euclidean,
  /// Squared shortest arc, centres by the arc-length Frechet mean.
  Circular,
};

struct ClusterOptions {
  ClusterMetric metric = ClusterMetric::Euclidean;
  int max_iterations = 100;
};

struct ClusterResult {
  std::vector<std::size_t> assignments;
  std::vector<double> centers;  ///< degrees; circular centres lie in [0, 360)
  std::vector<std::size_t> sizes;
  double within_ss = 0.0;       ///< sum of squared distances to the assigned centre
  /// within_ss after initial assignment and after every Lloyd iteration.
  std::vector<double> objective_history;
  int iterations = 0;
  bool converged = false;
  /// Fewer distinct values than requested clusters; centers.size() < k.
  bool collapsed = false;
};

/// Lloyd's algorithm on a list of azimuths.
///
/// Initial centres are k distinct values picked by greedy farthest-point
/// selection over the sorted distinct inputs, the first one chosen by `seed`.
/// The result depends only on the multiset of estimates, never on their order.
/// A cluster that empties is re-seeded with the point farthest from its centre.
ClusterResult kmeans_doa(std::span<const double> estimates_deg, std::size_t k, std::uint64_t seed,
                         const ClusterOptions& options = {});

/// Centre of the largest cluster; equal sizes go to the smallest centre angle.
double final_doa(const ClusterResult& result);

/// Squared distance under the metric.
double cluster_distance2(double a_deg, double b_deg, ClusterMetric metric);

/// Minimizer of the summed squared distance over a set of angles.
double cluster_center(std::span<const double> members_deg, ClusterMetric metric);

}  // namespace rssidoa
