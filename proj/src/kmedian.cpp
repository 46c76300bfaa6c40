#include "ssbm/cluster.hpp"

#include "clustering_common.hpp"
#include "partition_search.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace ssbm {

using detail::Metric;

double kmedian_cost(const Matrix& rows, const std::vector<int>& assignment, const Matrix& centers) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) total += (rows.row(i) - centers.row(assignment[i])).norm();
  return total;
}

Vector geometric_median(const Matrix& points, const Vector* start, double tol, int max_iterations) {
  if (points.rows() == 0) throw std::invalid_argument("geometric_median: no points");
  Vector x = start ? *start : Vector(points.colwise().mean().transpose());
  for (int it = 0; it < max_iterations; ++it) {
    Vector num = Vector::Zero(points.cols());
    Vector pull = Vector::Zero(points.cols());
    double den = 0.0;
    int coincident = 0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      const Vector diff = points.row(i).transpose() - x;
      const double d = diff.norm();
      if (d == 0.0) {
        ++coincident;
        continue;
      }
      num += points.row(i).transpose() / d;
      pull += diff / d;
      den += 1.0 / d;
    }
    if (den == 0.0) return x;  // every point sits at x
    const Vector weiszfeld = num / den;
    Vector next;
    if (coincident == 0) {
      next = weiszfeld;
    } else {
      // Vardi-Zhang: at a data point, stay if the pull of the others does
      // not exceed its multiplicity, otherwise step partially towards T(x).
      const double r = pull.norm();
      if (r <= coincident) return x;
      const double w = coincident / r;
      next = (1.0 - w) * weiszfeld + w * x;
    }
    const double step = (next - x).norm();
    x = std::move(next);
    if (step <= tol * std::max(1.0, x.norm())) break;
  }
  return x;
}

namespace {

Matrix gather(const Matrix& rows, const std::vector<int>& assignment, int k) {
  int count = 0;
  for (int g : assignment) count += (g == k);
  Matrix pts(count, rows.cols());
  int r = 0;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] == k) pts.row(r++) = rows.row(static_cast<Eigen::Index>(i));
  return pts;
}

struct Alternation {
  std::vector<int> assignment;
  Matrix centers;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  int repairs = 0;
  std::vector<double> history;
};

// Assignment / geometric-median updates from the given centers. Every step
// is non-increasing in the (2,1) cost.
Alternation alternate(const Matrix& rows, Matrix centers, int max_iterations) {
  const int n = static_cast<int>(rows.rows());
  const int K = static_cast<int>(centers.rows());
  Alternation out;
  out.assignment.assign(n, 0);
  std::vector<int> previous(n, -1);
  for (int it = 1; it <= max_iterations; ++it) {
    for (int i = 0; i < n; ++i) out.assignment[i] = detail::nearest_center(rows, i, centers, Metric::euclidean);
    out.repairs += detail::repair_empty_clusters(rows, out.assignment, centers, Metric::euclidean);
    const bool changed = out.assignment != previous;
    for (int k = 0; k < K; ++k) {
      const Matrix pts = gather(rows, out.assignment, k);
      if (pts.rows() == 0) continue;
      const Vector current = centers.row(k).transpose();
      centers.row(k) = geometric_median(pts, &current).transpose();
    }
    const double cost = kmedian_cost(rows, out.assignment, centers);
    assert(out.history.empty() || cost <= out.history.back() * (1.0 + 1e-9) + 1e-12);
    out.history.push_back(cost);
    out.iterations = it;
    if (!changed) {
      out.converged = true;
      break;
    }
    previous = out.assignment;
  }
  out.centers = std::move(centers);
  out.objective = kmedian_cost(rows, out.assignment, out.centers);
  return out;
}

detail::RestartOutcome kmedian_restart(const Matrix& rows, int K, const ApproxConfig& cfg, int restart) {
  Engine rng = make_engine({cfg.seed, static_cast<std::uint64_t>(restart), 0x6b6d6564ULL});
  const int n = static_cast<int>(rows.rows());
  const std::vector<int> seeds = detail::seed_rows(rows, K, cfg.seeding, Metric::euclidean, rng);
  Matrix init(K, rows.cols());
  for (int k = 0; k < K; ++k) init.row(k) = rows.row(seeds[k]);

  Alternation best = alternate(rows, init, cfg.max_iterations);
  std::vector<double> history = best.history;
  int repairs = best.repairs;

  // Single-swap local search: replace one center by a data row drawn with
  // probability proportional to its current cost, keep strict improvements.
  for (int attempt = 0; attempt < cfg.local_search_swaps; ++attempt) {
    std::vector<double> weight(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      weight[i] = (rows.row(i) - best.centers.row(best.assignment[i])).norm();
      total += weight[i];
    }
    if (total <= 0.0) break;  // zero cost: nothing to improve
    double u = draw_unit(rng) * total;
    int candidate = n - 1;
    for (int i = 0; i < n; ++i) {
      u -= weight[i];
      if (u < 0.0) {
        candidate = i;
        break;
      }
    }
    bool improved = false;
    for (int k = 0; k < K; ++k) {
      Matrix trial = best.centers;
      trial.row(k) = rows.row(candidate);
      Alternation alt = alternate(rows, trial, cfg.max_iterations);
      repairs += alt.repairs;
      if (alt.objective < best.objective * (1.0 - 1e-12)) {
        best = std::move(alt);
        improved = true;
      }
    }
    if (improved) history.push_back(best.objective);
  }

  detail::RestartOutcome out;
  out.assignment = std::move(best.assignment);
  out.centers = std::move(best.centers);
  out.objective = best.objective;
  out.iterations = best.iterations;
  out.converged = best.converged;
  out.repairs = repairs;
  out.history = std::move(history);
  return out;
}

}  // namespace

ClusteringResult kmedian_approx(const Matrix& rows, int K, const ApproxConfig& cfg) {
  cfg.validate();
  if (K < 1) throw std::invalid_argument("kmedian_approx: K must be >= 1");
  if (rows.rows() < K) throw std::invalid_argument("kmedian_approx: need n >= K");
  std::vector<detail::RestartOutcome> outcomes(cfg.restarts);
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < cfg.restarts; ++r) outcomes[r] = kmedian_restart(rows, K, cfg, r);
  return detail::reduce_restarts(outcomes, K);
}

ClusteringResult kmedian_exact(const Matrix& rows, int K) {
  const int n = static_cast<int>(rows.rows());
  if (K < 1 || n < K) throw std::invalid_argument("kmedian_exact: need 1 <= K <= n");
  if (n > 12) throw InstanceTooLarge("kmedian_exact: instance too large for exhaustive search");

  std::vector<Vector> medians(std::size_t{1} << n);
  const auto block_cost = [&](std::uint32_t mask) {
    Matrix pts(__builtin_popcount(mask), rows.cols());
    int r = 0;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1u) pts.row(r++) = rows.row(i);
    medians[mask] = geometric_median(pts);
    double c = 0.0;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) c += (pts.row(i).transpose() - medians[mask]).norm();
    return c;
  };
  detail::PartitionOptimum opt = detail::best_partition(n, K, block_cost);

  ClusteringResult res;
  res.centers.resize(K, rows.cols());
  for (int k = 0; k < K; ++k) {
    std::uint32_t mask = 0;
    for (int i = 0; i < n; ++i)
      if (opt.assignment[i] == k) mask |= 1u << i;
    res.centers.row(k) = medians[mask].transpose();
  }
  res.objective = kmedian_cost(rows, opt.assignment, res.centers);
  res.membership = MembershipMatrix(std::move(opt.assignment), K);
  res.restarts_used = 1;
  res.converged = true;
  res.objective_history = {res.objective};
  return res;
}

SphericalResult spherical_kmedian(const Matrix& Uhat, int K, const ApproxConfig& cfg) {
  const int n = static_cast<int>(Uhat.rows());
  if (n < K) throw std::invalid_argument("spherical_kmedian: need n >= K");
  SphericalResult out;
  out.normalized = Matrix::Zero(n, Uhat.cols());
  for (int i = 0; i < n; ++i) {
    const double norm = Uhat.row(i).norm();
    if (norm > kZeroRowThreshold) {
      out.positive_rows.push_back(i);
      out.normalized.row(i) = Uhat.row(i) / norm;
    } else {
      out.zero_rows.push_back(i);
    }
  }
  if (out.positive_rows.empty()) throw std::invalid_argument("spherical_kmedian: all rows are zero");
  if (static_cast<int>(out.positive_rows.size()) < K)
    throw std::invalid_argument("spherical_kmedian: fewer nonzero rows than K");

  Matrix active(out.positive_rows.size(), Uhat.cols());
  for (std::size_t r = 0; r < out.positive_rows.size(); ++r) active.row(r) = out.normalized.row(out.positive_rows[r]);
  ClusteringResult sub = kmedian_approx(active, K, cfg);

  std::vector<int> assignment(n, 0);  // zero rows go to community 1
  for (std::size_t r = 0; r < out.positive_rows.size(); ++r) assignment[out.positive_rows[r]] = sub.membership[r];
  out.clustering = std::move(sub);
  out.clustering.membership = MembershipMatrix(std::move(assignment), K, false);
  return out;
}

}  // namespace ssbm
