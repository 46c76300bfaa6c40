#pragma once

// Pieces shared by the k-means and k-median heuristics.

#include "ssbm/cluster.hpp"
#include "ssbm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace ssbm::detail {

/// Distance used for seeding weights and repair: squared for k-means,
/// plain Euclidean for k-median.
enum class Metric { squared, euclidean };

inline double point_distance(const Matrix& rows, int i, const Matrix& centers, int k, Metric metric) {
  const double sq = (rows.row(i) - centers.row(k)).squaredNorm();
  return metric == Metric::squared ? sq : std::sqrt(sq);
}

/// Lowest center index wins ties.
inline int nearest_center(const Matrix& rows, int i, const Matrix& centers, Metric metric) {
  int best = 0;
  double best_d = point_distance(rows, i, centers, 0, metric);
  for (int k = 1; k < centers.rows(); ++k) {
    const double d = point_distance(rows, i, centers, k, metric);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

/// Returns the indices of the K seed rows.
inline std::vector<int> seed_rows(const Matrix& rows, int K, Seeding scheme, Metric metric, Engine& rng) {
  const int n = static_cast<int>(rows.rows());
  std::vector<int> chosen;
  chosen.reserve(K);
  if (scheme == Seeding::uniform) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (int k = 0; k < K; ++k) {
      const int j = k + static_cast<int>(draw_index(rng, static_cast<std::uint64_t>(n - k)));
      std::swap(idx[k], idx[j]);
      chosen.push_back(idx[k]);
    }
    return chosen;
  }

  std::vector<bool> taken(n, false);
  chosen.push_back(static_cast<int>(draw_index(rng, static_cast<std::uint64_t>(n))));
  taken[chosen.back()] = true;
  std::vector<double> weight(n, std::numeric_limits<double>::infinity());
  while (static_cast<int>(chosen.size()) < K) {
    const int last = chosen.back();
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      const double sq = (rows.row(i) - rows.row(last)).squaredNorm();
      const double d = metric == Metric::squared ? sq : std::sqrt(sq);
      weight[i] = std::min(weight[i], d);
      if (!taken[i]) total += weight[i];
    }
    int pick = -1;
    if (total > 0.0) {
      double u = draw_unit(rng) * total;
      for (int i = 0; i < n; ++i) {
        if (taken[i] || weight[i] <= 0.0) continue;
        pick = i;
        u -= weight[i];
        if (u < 0.0) break;
      }
    }
    if (pick < 0) {
      // Remaining rows duplicate the chosen ones: take any free row.
      std::vector<int> free_rows;
      for (int i = 0; i < n; ++i)
        if (!taken[i]) free_rows.push_back(i);
      pick = free_rows[draw_index(rng, free_rows.size())];
    }
    taken[pick] = true;
    chosen.push_back(pick);
  }
  return chosen;
}

/// Moves, for every empty cluster, the point farthest from its center (among
/// clusters with more than one member) into it. Returns the number of moves.
inline int repair_empty_clusters(const Matrix& rows, std::vector<int>& assignment, Matrix& centers,
                                 Metric metric) {
  const int K = static_cast<int>(centers.rows());
  std::vector<int> count(K, 0);
  for (int g : assignment) ++count[g];
  int events = 0;
  for (int k = 0; k < K; ++k) {
    if (count[k] > 0) continue;
    int far = -1;
    double far_d = -1.0;
    for (int i = 0; i < static_cast<int>(assignment.size()); ++i) {
      if (count[assignment[i]] <= 1) continue;
      const double d = point_distance(rows, i, centers, assignment[i], metric);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    if (far < 0) break;  // fewer points than clusters
    --count[assignment[far]];
    assignment[far] = k;
    count[k] = 1;
    centers.row(k) = rows.row(far);
    ++events;
  }
  return events;
}

struct RestartOutcome {
  std::vector<int> assignment;
  Matrix centers;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  int repairs = 0;
  std::vector<double> history;
};

/// Best outcome (lowest objective, ties to the lowest restart index).
inline ClusteringResult reduce_restarts(std::vector<RestartOutcome>& outcomes, int K) {
  std::size_t best = 0;
  int repairs = 0;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    repairs += outcomes[r].repairs;
    if (outcomes[r].objective < outcomes[best].objective) best = r;
  }
  RestartOutcome& win = outcomes[best];
  ClusteringResult res;
  res.membership = MembershipMatrix(std::move(win.assignment), K, false);
  res.centers = std::move(win.centers);
  res.objective = win.objective;
  res.restarts_used = static_cast<int>(outcomes.size());
  res.best_restart_index = static_cast<int>(best);
  res.iterations = win.iterations;
  res.converged = win.converged;
  res.repair_events = repairs;
  res.objective_history = std::move(win.history);
  return res;
}

}  // namespace ssbm::detail
