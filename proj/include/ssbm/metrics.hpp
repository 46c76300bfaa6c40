#pragma once

#include "ssbm/model.hpp"

#include <span>
#include <vector>

namespace ssbm {

/// counts(a, b) = #{i : estimate_i = a, truth_i = b}.
Eigen::MatrixXi confusion_matrix(const MembershipMatrix& estimate, const MembershipMatrix& truth);

/// Maximum-weight perfect matching on a square matrix (Hungarian method).
/// Returns col[r], the column matched to row r.
std::vector<int> max_weight_assignment(const Matrix& weights);

/// A label permutation: `J[a]` is the true community matched to estimated
/// cluster a.
using Permutation = std::vector<int>;

struct ErrorL {
  double L = 0.0;
  Permutation J;
  std::vector<int> mismatched;  ///< nodes i with J[estimate_i] != truth_i
};

struct ErrorLTilde {
  double L_tilde = 0.0;
  Permutation J;
};

/// Overall relative error (2/n) * #mismatches, minimized over permutations.
ErrorL error_L(const MembershipMatrix& estimate, const MembershipMatrix& truth);

/// Worst per-community relative error, minimized over all K! permutations.
/// Requires K <= 10.
ErrorLTilde error_L_tilde(const MembershipMatrix& estimate, const MembershipMatrix& truth);

inline constexpr int kMaxEnumeratedK = 10;

struct ErrorReport {
  double L = 0.0;
  double L_tilde = 0.0;
  Permutation J_L;
  Permutation J_L_tilde;
  /// Mismatches per true community under J_L.
  std::vector<int> per_community_errors;
  std::vector<int> misclustered_nodes;
};

ErrorReport error_report(const MembershipMatrix& estimate, const MembershipMatrix& truth);

/// delta_k = sqrt(1/n_k + 1/max_{l != k} n_l); 1/sqrt(n) when K = 1.
std::vector<double> default_deltas(const MembershipMatrix& truth);

struct ExceptionSets {
  std::vector<std::vector<int>> sets;  ///< S_k, node indices in increasing order
  double weighted_count = 0.0;         ///< sum_k |S_k| delta_k^2
  double relative_count = 0.0;         ///< sum_k |S_k| / n_k
  std::vector<int> correct_nodes;      ///< union of G_k \ S_k
};

/// S_k = {i in G_k : ||Ubar_i - U_i|| >= delta_k / 2}. `U` must already be
/// aligned to `Ubar`. Rejects delta_k above the smallest distance from the
/// community-k row of U to any other community row.
ExceptionSets exception_sets(const Matrix& Ubar, const Matrix& U, const MembershipMatrix& truth,
                             std::span<const double> delta);

/// True when some permutation maps estimate to truth on every node in `nodes`.
bool labels_agree_on(const MembershipMatrix& estimate, const MembershipMatrix& truth,
                     std::span<const int> nodes);

}  // namespace ssbm
