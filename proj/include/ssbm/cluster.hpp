#pragma once

#include "ssbm/model.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace ssbm {

enum class Seeding {
  /// Distance-weighted randomized seeding (D^2 for k-means, D for k-median).
  weighted,
  /// K distinct rows chosen uniformly.
  uniform,
};

/// Heuristic solver settings. `epsilon` is the nominal approximation slack
/// reported alongside results; the solvers do not certify it.
struct ApproxConfig {
  double epsilon = 0.0;
  int restarts = 10;
  int max_iterations = 300;
  Seeding seeding = Seeding::weighted;
  /// Single-swap local search attempts after alternation (k-median only).
  int local_search_swaps = 16;
  std::uint64_t seed = 0xc1a55eedULL;

  void validate() const {
    if (restarts < 1) throw std::invalid_argument("ApproxConfig: restarts must be >= 1");
    if (max_iterations < 1) throw std::invalid_argument("ApproxConfig: max_iterations must be >= 1");
    if (local_search_swaps < 0) throw std::invalid_argument("ApproxConfig: local_search_swaps must be >= 0");
  }
};

struct ClusteringResult {
  MembershipMatrix membership;
  Matrix centers;  ///< K x dim
  /// Squared Frobenius cost (k-means) or (2,1)-norm cost (k-median).
  double objective = 0.0;
  int restarts_used = 0;
  int best_restart_index = 0;
  int iterations = 0;  ///< alternation steps of the winning restart
  bool converged = false;
  int repair_events = 0;  ///< empty-cluster reseeds across all restarts
  /// Cost after each alternation step of the winning restart.
  std::vector<double> objective_history;
};

/// Spherical k-median output: the clustering of all n nodes plus the split
/// into rows that were clustered (I+) and zero rows assigned to community 1.
struct SphericalResult {
  ClusteringResult clustering;
  std::vector<int> positive_rows;
  std::vector<int> zero_rows;
  /// Input with nonzero rows scaled to unit length (zero rows left as zero).
  Matrix normalized;
};

/// Rows at or below this norm are treated as zero rows.
inline constexpr double kZeroRowThreshold = 1e-12;

double kmeans_cost(const Matrix& rows, const std::vector<int>& assignment, const Matrix& centers);
double kmedian_cost(const Matrix& rows, const std::vector<int>& assignment, const Matrix& centers);

/// Weighted seeding + Lloyd iterations, best of `cfg.restarts`.
ClusteringResult kmeans_approx(const Matrix& rows, int K, const ApproxConfig& cfg = {});

/// Global optimum of the k-means objective by exhaustive search over
/// partitions. Allowed sizes: n <= 14 with K <= 3, or n <= 12 with K <= 4.
ClusteringResult kmeans_exact(const Matrix& rows, int K);

/// Weighted seeding, alternating assignment / geometric-median updates, and
/// single-swap local search, best of `cfg.restarts`.
ClusteringResult kmedian_approx(const Matrix& rows, int K, const ApproxConfig& cfg = {});

/// Global optimum of the (2,1)-norm objective, n <= 12.
ClusteringResult kmedian_exact(const Matrix& rows, int K);

/// Drops zero rows, normalizes the rest, clusters them with `kmedian_approx`.
SphericalResult spherical_kmedian(const Matrix& Uhat, int K, const ApproxConfig& cfg = {});

/// Weiszfeld iteration with the Vardi-Zhang correction at data points.
/// Starts at `start` when given (non-increasing cost), else at the centroid.
Vector geometric_median(const Matrix& points, const Vector* start = nullptr, double tol = 1e-10,
                        int max_iterations = 10000);

class InstanceTooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace ssbm
