#pragma once

#include "ssbm/cluster.hpp"
#include "ssbm/eigensolver.hpp"
#include "ssbm/metrics.hpp"
#include "ssbm/model.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ssbm {

inline constexpr double kBoundSlack = 1e-9;
inline constexpr double kNearBoundaryFraction = 0.01;

/// Everything a bound needs, so a report can be recomputed from its snapshot.
/// Unused fields stay NaN / empty.
struct BoundInputs {
  static constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  int n = 0;
  int K = 0;
  int rank = 0;
  double alpha = nan;
  double gamma = nan;
  double lambda = nan;
  double epsilon = 0.0;
  int n_min = 0;
  int n_max = 0;
  int n_max_second = 0;
  double d = nan;
  std::vector<int> sizes;
  std::vector<double> nu;
  double n_tilde_min = nan;  ///< min_k ||phi_k||^2
  double weighted_heterogeneity = nan;  ///< sum_k n_k^2 nu_k

  /// Concentration constant (C) and an explicit override of c. When
  /// `c_override` is NaN, c comes from C: 1/(64 C^2) for SBM statements,
  /// 1/(8 C) for DCBM statements.
  double C = nan;
  double c_override = nan;

  /// Run-level data: the observed statistic compared against a bound, the
  /// aligned Frobenius distance ||Uhat - U Q||_F and the radii delta_k.
  double observed = nan;
  double frobenius_distance = nan;
  std::vector<double> deltas;
};

struct BoundReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  bool near_boundary = false;  ///< |lhs - rhs| within 1% of |rhs|
  double c_used = BoundInputs::nan;
  BoundInputs inputs;
};

double c_sbm(double C);
double c_dcbm(double C);

/// Snapshot of the model-level quantities. `lambda` defaults to the preset's
/// recorded value; heterogeneity fields are filled for every spec (plain SBM
/// specs have nu_k = 1).
BoundInputs model_bound_inputs(const ModelSpec& spec, const PopulationEigen& pop, double epsilon, double C,
                               std::optional<double> lambda = std::nullopt);

/// Evaluates the named statement from `inputs`. Names:
///   sbm_condition, sbm_bound, sbm_corollary_condition, sbm_corollary_L_tilde,
///   sbm_corollary_L, dcbm_condition, dcbm_bound, dcbm_corollary_condition,
///   dcbm_corollary_bound, dcbm_rate_reference, lemma_hamming,
///   lemma_hamming_recovery, lemma_zero_rows, dcbm_exception_count.
BoundReport evaluate_bound(const std::string& name, const BoundInputs& inputs);

/// Recomputes a report from its own snapshot.
BoundReport reevaluate(const BoundReport& report);

struct BoundPair {
  BoundReport condition;
  BoundReport bound;
};

/// `observed` in the inputs is the run's sum_k |S_k| / n_k (NaN allowed).
BoundPair sbm_condition_and_bound(const BoundInputs& inputs);
/// Returns {condition, L~ bound, L bound}; the L~ report compares
/// inputs.observed, the L report compares `observed_L`.
struct CorollaryBounds {
  BoundReport condition;
  BoundReport L_tilde;
  BoundReport L;
};
CorollaryBounds sbm_corollary_bounds(const BoundInputs& inputs, double observed_L_tilde, double observed_L);
/// `observed` is the run's L.
BoundPair dcbm_condition_and_bound(const BoundInputs& inputs);
BoundPair dcbm_corollary_bounds(const BoundInputs& inputs);

/// lambda^2 alpha^2 n / (sigma^2 log n) with sigma^2 = alpha (1 - alpha);
/// printed for comparison only.
double mcsherry_reference(const BoundInputs& inputs);

struct HammingCheck {
  BoundReport inequality;  ///< sum |S_k| delta_k^2 <= 4 (4 + 2 eps) ||Uhat - U||_F^2
  BoundReport recovery;    ///< max_k (16 + 8 eps) ||Uhat - U||_F^2 / (delta_k^2 n_k) vs 1
  ExceptionSets sets;
  bool agreement_checked = false;
  bool agreement = false;
  /// eps was certified against the exact oracle rather than given nominally.
  bool epsilon_certified = false;
};

/// Uses the k-means output (centers per node) against the aligned
/// population rows. `epsilon` is the observed or nominal slack.
HammingCheck lemma_hamming_check(const Matrix& Uhat, const Matrix& U, const ClusteringResult& result,
                                 const MembershipMatrix& truth, double epsilon, bool epsilon_certified,
                                 std::optional<std::vector<double>> deltas = std::nullopt);

/// |I0| <= sqrt(sum_k n_k^2 nu_k) ||Uhat - U Q||_F.
BoundReport lemma_zero_rows_check(const Matrix& Uhat, const Matrix& U, const MembershipMatrix& truth,
                                  const HeterogeneityStats& stats);

struct DcbmProofSets {
  std::vector<int> S;
  std::vector<int> I0;
  BoundReport report;  ///< |S| + |I0| against the proof bound
};

/// S = {i in I+ : ||center(i) - U'_i|| >= 1/sqrt 2}, U' the row-normalized
/// aligned population rows. `inputs` supplies n, K, alpha, gamma, eps, C and
/// the weighted heterogeneity.
DcbmProofSets dcbm_proof_sets(const SphericalResult& result, const Matrix& Ualigned, const BoundInputs& inputs);

struct ConcentrationCell {
  int n = 0;
  double c0 = 1.0;
  /// Expected degree scale; defaults to c0 log n.
  std::optional<double> d;
};

struct CellSummary {
  int n = 0;
  double c0 = 0.0;
  double d = 0.0;
  int replicates = 0;
  std::vector<double> ratios;  ///< ||A - P|| / sqrt(d), replicate order
  double max_ratio = 0.0;
  double mean_ratio = 0.0;
  double q50 = 0.0;
  double q90 = 0.0;
  double q99 = 0.0;
  /// ||A - P|| / sqrt(d log n): the max and the median.
  double max_log_ratio = 0.0;
  double median_log_ratio = 0.0;
};

struct ConcentrationStudy {
  double C_empirical = 0.0;
  std::vector<CellSummary> cells;
};

/// Erdos-Renyi graphs with p = d / n per cell, ||A - P|| per replicate.
/// Replicate r of cell c uses SeedSpec{derive_seed({master_seed, c}), r}.
ConcentrationStudy spectral_concentration_study(const std::vector<ConcentrationCell>& cells, int replicates,
                                                std::uint64_t master_seed, const EigenConfig& cfg = {});

/// Linear-interpolation sample quantile.
double quantile(std::vector<double> values, double q);

}  // namespace ssbm
