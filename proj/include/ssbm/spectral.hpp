#pragma once

#include "ssbm/eigensolver.hpp"
#include "ssbm/model.hpp"
#include "ssbm/sampler.hpp"

#include <iosfwd>

namespace ssbm {

/// Leading-K eigenpairs of a symmetric matrix, ordered by decreasing |value|.
/// Signs and within-eigenspace rotations are arbitrary.
struct SpectralEmbedding {
  Matrix vectors;  ///< n x K, orthonormal columns
  Vector values;   ///< K values ordered by decreasing |value|
  /// max_k ||M v_k - value_k v_k||
  double residual = 0.0;
  /// |value_K| equals |value_{K+1}| (within tolerance); the algebraically
  /// larger of the tied values was kept.
  bool tie_warning = false;
  int iterations = 0;
  EigenMethod method = EigenMethod::dense;
};

SpectralEmbedding leading_eigenvectors(const AdjacencyMatrix& A, int K, const EigenConfig& cfg = {});
/// Dense symmetric input (e.g. a noiseless P). Uses the dense solver.
SpectralEmbedding leading_eigenvectors(const Matrix& M, int K, const EigenConfig& cfg = {});
/// Matrix-free input. Always iterative.
SpectralEmbedding leading_eigenvectors(const SymmetricOperator& op, int K, const EigenConfig& cfg = {});

/// Largest |eigenvalue| of a symmetric operator.
double spectral_norm(const SymmetricOperator& op, const EigenConfig& cfg = {});
double spectral_norm(const Matrix& M);

/// ||A - P|| with P = U diag(D) U^T taken from the population factorization.
/// Dense below `cfg.dense_max_n` (automatic method), matrix-free above.
double spectral_norm_difference(const AdjacencyMatrix& A, const PopulationEigen& pop,
                                const EigenConfig& cfg = {});

struct AlignmentResult {
  Matrix Q;                         ///< K x K orthogonal
  double frobenius_distance = 0.0;  ///< ||Uhat - U Q||_F
  /// U^T Uhat was singular; Q is one valid completion of the polar factor.
  bool rank_deficient = false;
};

/// argmin over orthogonal Q of ||Uhat - U Q||_F via the polar factor of U^T Uhat.
AlignmentResult procrustes_align(const Matrix& Uhat, const Matrix& U);

struct DavisKahanCheck {
  double lhs = 0.0;  ///< Procrustes distance
  double rhs = 0.0;  ///< 2 sqrt(2K) ||A - P|| / gamma
  bool holds = false;
  AlignmentResult alignment;
};

/// Subspace perturbation inequality with the Frobenius-optimal rotation.
DavisKahanCheck davis_kahan_gap_bound(const Matrix& Uhat, const Matrix& U, double gamma,
                                      double norm_difference);

/// n rows of K comma-separated values, full round-trip precision.
void write_embedding_csv(std::ostream& out, const Matrix& vectors);

}  // namespace ssbm
