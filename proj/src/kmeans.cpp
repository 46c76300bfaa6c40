#include "ssbm/cluster.hpp"

#include "clustering_common.hpp"
#include "partition_search.hpp"

#include <cassert>
#include <stdexcept>

namespace ssbm {

using detail::Metric;

double kmeans_cost(const Matrix& rows, const std::vector<int>& assignment, const Matrix& centers) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) total += (rows.row(i) - centers.row(assignment[i])).squaredNorm();
  return total;
}

namespace {

Matrix cluster_means(const Matrix& rows, const std::vector<int>& assignment, const Matrix& previous) {
  const Eigen::Index K = previous.rows();
  Matrix sums = Matrix::Zero(K, rows.cols());
  std::vector<int> count(K, 0);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    sums.row(assignment[i]) += rows.row(i);
    ++count[assignment[i]];
  }
  for (Eigen::Index k = 0; k < K; ++k) {
    if (count[k] > 0)
      sums.row(k) /= count[k];
    else
      sums.row(k) = previous.row(k);
  }
  return sums;
}

detail::RestartOutcome lloyd_restart(const Matrix& rows, int K, const ApproxConfig& cfg, int restart) {
  Engine rng = make_engine({cfg.seed, static_cast<std::uint64_t>(restart), 0x6b6d65616e73ULL});
  const int n = static_cast<int>(rows.rows());
  detail::RestartOutcome out;
  const std::vector<int> seeds = detail::seed_rows(rows, K, cfg.seeding, Metric::squared, rng);
  out.centers.resize(K, rows.cols());
  for (int k = 0; k < K; ++k) out.centers.row(k) = rows.row(seeds[k]);

  std::vector<int> previous(n, -1);
  out.assignment.assign(n, 0);
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    for (int i = 0; i < n; ++i) out.assignment[i] = detail::nearest_center(rows, i, out.centers, Metric::squared);
    out.repairs += detail::repair_empty_clusters(rows, out.assignment, out.centers, Metric::squared);
    const bool changed = out.assignment != previous;
    out.centers = cluster_means(rows, out.assignment, out.centers);
    const double cost = kmeans_cost(rows, out.assignment, out.centers);
    assert(out.history.empty() || cost <= out.history.back() * (1.0 + 1e-12) + 1e-300);
    out.history.push_back(cost);
    out.iterations = it;
    if (!changed) {
      out.converged = true;
      break;
    }
    previous = out.assignment;
  }
  out.objective = kmeans_cost(rows, out.assignment, out.centers);
  return out;
}

}  // namespace

ClusteringResult kmeans_approx(const Matrix& rows, int K, const ApproxConfig& cfg) {
  cfg.validate();
  if (K < 1) throw std::invalid_argument("kmeans_approx: K must be >= 1");
  if (rows.rows() < K) throw std::invalid_argument("kmeans_approx: need n >= K");
  std::vector<detail::RestartOutcome> outcomes(cfg.restarts);
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < cfg.restarts; ++r) outcomes[r] = lloyd_restart(rows, K, cfg, r);
  return detail::reduce_restarts(outcomes, K);
}

ClusteringResult kmeans_exact(const Matrix& rows, int K) {
  const int n = static_cast<int>(rows.rows());
  if (K < 1 || n < K) throw std::invalid_argument("kmeans_exact: need 1 <= K <= n");
  const bool feasible = (n <= 14 && K <= 3) || (n <= 12 && K <= 4);
  if (!feasible) throw InstanceTooLarge("kmeans_exact: instance too large for exhaustive search");

  const auto block_cost = [&](std::uint32_t mask) {
    Vector mean = Vector::Zero(rows.cols());
    int count = 0;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1u) {
        mean += rows.row(i).transpose();
        ++count;
      }
    mean /= count;
    double c = 0.0;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1u) c += (rows.row(i).transpose() - mean).squaredNorm();
    return c;
  };
  detail::PartitionOptimum opt = detail::best_partition(n, K, block_cost);

  ClusteringResult res;
  res.centers = cluster_means(rows, opt.assignment, Matrix::Zero(K, rows.cols()));
  res.objective = kmeans_cost(rows, opt.assignment, res.centers);
  res.membership = MembershipMatrix(std::move(opt.assignment), K);
  res.restarts_used = 1;
  res.converged = true;
  res.objective_history = {res.objective};
  return res;
}

}  // namespace ssbm
