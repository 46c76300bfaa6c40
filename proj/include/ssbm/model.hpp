#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ssbm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Community assignment of n nodes into K communities.
///
/// Communities are stored 0-based internally; `labels()` and the JSON form
/// use 1-based labels. The dense n x K indicator is only built on request.
class MembershipMatrix {
 public:
  MembershipMatrix() = default;

  /// `communities[i]` in [0, K). With `require_nonempty` (the default, used
  /// for ground truth) every community must own at least one node; estimates
  /// may leave communities empty.
  MembershipMatrix(std::vector<int> communities, int K, bool require_nonempty = true);

  static MembershipMatrix from_labels(std::span<const int> one_based, int K,
                                      bool require_nonempty = true);
  /// Contiguous blocks: the first sizes[0] nodes form community 0, and so on.
  static MembershipMatrix from_sizes(std::span<const int> sizes);

  int n() const { return static_cast<int>(communities_.size()); }
  int K() const { return K_; }
  int operator[](std::size_t i) const { return communities_[i]; }
  const std::vector<int>& communities() const { return communities_; }
  std::vector<int> labels() const;

  const std::vector<int>& sizes() const { return sizes_; }
  int size(int k) const { return sizes_[k]; }
  int n_min() const;
  int n_max() const;
  /// Second largest community size (n'_max); equals n_max when K == 1.
  int n_max_second() const;
  std::vector<int> members(int k) const;

  Matrix dense() const;

  bool operator==(const MembershipMatrix&) const = default;

 private:
  std::vector<int> communities_;
  int K_ = 0;
  std::vector<int> sizes_;
};

/// Symmetric K x K matrix of edge probabilities.
class ConnectivityMatrix {
 public:
  ConnectivityMatrix() = default;
  explicit ConnectivityMatrix(Matrix B);

  const Matrix& matrix() const { return B_; }
  int K() const { return static_cast<int>(B_.rows()); }
  double operator()(int k, int l) const { return B_(k, l); }
  double max_entry() const { return B_.maxCoeff(); }

 private:
  Matrix B_;
};

/// Per-node degree propensities of a degree-corrected model.
/// Identifiability: the maximum over each community equals 1.
class DegreeParams {
 public:
  DegreeParams() = default;
  DegreeParams(std::vector<double> psi, const MembershipMatrix& membership);

  /// Rescales each community so that its largest propensity is exactly 1.
  static DegreeParams normalized(std::vector<double> raw, const MembershipMatrix& membership);

  const std::vector<double>& values() const { return psi_; }
  double operator[](std::size_t i) const { return psi_[i]; }

 private:
  std::vector<double> psi_;
};

/// Provenance of a spec built by one of the presets.
struct PresetInfo {
  std::string name;
  std::optional<double> lambda;
  std::optional<double> alpha;
  std::optional<int> clique_size;

  bool operator==(const PresetInfo&) const = default;
};

/// Full parameterization (Theta, B, psi) of an SBM or DCBM.
class ModelSpec {
 public:
  ModelSpec(MembershipMatrix membership, ConnectivityMatrix connectivity,
            std::optional<DegreeParams> degrees = std::nullopt,
            std::optional<PresetInfo> preset = std::nullopt);

  const MembershipMatrix& membership() const { return membership_; }
  const ConnectivityMatrix& connectivity() const { return connectivity_; }
  const std::optional<DegreeParams>& degrees() const { return degrees_; }
  const std::optional<PresetInfo>& preset() const { return preset_; }

  int n() const { return membership_.n(); }
  int K() const { return membership_.K(); }
  bool degree_corrected() const { return degrees_.has_value(); }
  double psi(int i) const { return degrees_ ? (*degrees_)[i] : 1.0; }

  /// alpha_n = max_{k,l} B_kl.
  double alpha() const { return alpha_; }
  /// Expected degree scale d = n * alpha_n.
  double d() const { return n() * alpha_; }

  /// P_ij = psi_i psi_j B_{g_i g_j}, diagonal included.
  double probability(int i, int j) const {
    return psi(i) * psi(j) * connectivity_(membership_[i], membership_[j]);
  }

 private:
  MembershipMatrix membership_;
  ConnectivityMatrix connectivity_;
  std::optional<DegreeParams> degrees_;
  std::optional<PresetInfo> preset_;
  double alpha_ = 0.0;
};

/// Exact eigenstructure of P obtained from the K x K core matrix.
struct PopulationEigen {
  Matrix U;  ///< n x K, orthonormal columns, ordered by decreasing |D|.
  Vector D;  ///< K eigenvalues.
  /// SBM: X with U = Theta X. DCBM: orthogonal H with U_i = psi~_i H_{g_i}.
  Matrix core;
  bool degree_corrected = false;
  double gamma = 0.0;  ///< Smallest nonzero |eigenvalue|.
  int rank = 0;
  bool rank_deficient = false;
  /// Multiplicity of each distinct eigenvalue, in the order of D.
  std::vector<int> multiplicities;
};

/// Heterogeneity summaries of a DCBM (psi == 1 for plain SBM specs).
struct HeterogeneityStats {
  std::vector<double> phi_norms;  ///< ||phi_k||
  std::vector<double> n_tilde;    ///< ||phi_k||^2, effective community sizes
  std::vector<double> psi_tilde;  ///< psi_i / ||phi_{g_i}||
  std::vector<double> nu;         ///< n_k^-2 sum_{i in G_k} psi~_i^-2
  double n_tilde_min = 0.0;
  double n_tilde_max = 0.0;

  /// sum_k n_k^2 nu_k.
  double weighted_heterogeneity(const MembershipMatrix& membership) const;
};

/// Indices sorting `values` by decreasing magnitude; equal magnitudes put the
/// algebraically larger value first. All eigenpair orderings use this rule.
std::vector<int> order_by_magnitude(const Vector& values);

/// Dense n x n P. Intended for desk-scale checks; memory is O(n^2).
Matrix build_probability_matrix(const ModelSpec& spec);

PopulationEigen population_eigen(const ModelSpec& spec);

HeterogeneityStats heterogeneity_stats(const ModelSpec& spec);

/// Community sizes differing by at most one, larger communities first.
std::vector<int> balanced_sizes(int n, int K);

/// B = alpha * (lambda I + (1 - lambda) 1 1^T).
ModelSpec preset_planted_partition(int n, int K, double alpha, double lambda,
                                   std::span<const int> sizes);

/// K = 2, B = [[1, 1/2], [1/2, 1/2]], first `clique_size` nodes form the clique.
ModelSpec preset_planted_clique(int n, int clique_size);

/// Same partition and connectivity, with degree propensities attached.
ModelSpec with_degrees(const ModelSpec& spec, DegreeParams degrees);

}  // namespace ssbm
