#include "ssbm/spectral.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace ssbm {

namespace {

constexpr double kInequalitySlack = 1e-9;

bool use_dense(int n, const EigenConfig& cfg) {
  switch (cfg.method) {
    case EigenMethod::dense: return true;
    case EigenMethod::iterative: return false;
    case EigenMethod::automatic: return n <= cfg.dense_max_n;
  }
  return true;
}

SpectralEmbedding to_embedding(const EigenPairs& pairs) {
  SpectralEmbedding emb;
  emb.vectors = pairs.vectors;
  emb.values = pairs.values;
  emb.residual = pairs.residuals.size() > 0 ? pairs.residuals.maxCoeff() : 0.0;
  emb.iterations = pairs.iterations;
  emb.method = pairs.method;
  if (pairs.has_next) {
    const double last = std::abs(pairs.values[pairs.values.size() - 1]);
    const double tol = 1e-9 * std::max(pairs.norm_estimate, 1.0);
    emb.tie_warning = std::abs(last - std::abs(pairs.next_value)) <= tol;
  }
  return emb;
}

void check_rank(int n, int K) {
  if (K < 1 || K > n) throw std::invalid_argument("leading_eigenvectors: need 1 <= K <= n");
}

}  // namespace

SpectralEmbedding leading_eigenvectors(const AdjacencyMatrix& A, int K, const EigenConfig& cfg) {
  check_rank(A.n(), K);
  if (use_dense(A.n(), cfg)) return to_embedding(dense_extremal_eigenpairs(A.dense(), K));
  return to_embedding(iterative_extremal_eigenpairs(adjacency_operator(A), K, cfg));
}

SpectralEmbedding leading_eigenvectors(const Matrix& M, int K, const EigenConfig&) {
  check_rank(static_cast<int>(M.rows()), K);
  return to_embedding(dense_extremal_eigenpairs(M, K));
}

SpectralEmbedding leading_eigenvectors(const SymmetricOperator& op, int K, const EigenConfig& cfg) {
  check_rank(op.n(), K);
  return to_embedding(iterative_extremal_eigenpairs(op, K, cfg));
}

double spectral_norm(const SymmetricOperator& op, const EigenConfig& cfg) {
  if (op.n() == 0) return 0.0;
  return std::abs(iterative_extremal_eigenpairs(op, 1, cfg).values[0]);
}

double spectral_norm(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_norm_difference(const AdjacencyMatrix& A, const PopulationEigen& pop,
                                const EigenConfig& cfg) {
  if (pop.U.rows() != A.n()) throw std::invalid_argument("spectral_norm_difference: size mismatch");
  if (use_dense(A.n(), cfg)) {
    Matrix diff = A.dense();
    diff.noalias() -= pop.U * pop.D.asDiagonal() * pop.U.transpose();
    return spectral_norm(diff);
  }
  return spectral_norm(low_rank_shift(adjacency_operator(A), pop.U, pop.D), cfg);
}

AlignmentResult procrustes_align(const Matrix& Uhat, const Matrix& U) {
  if (Uhat.rows() != U.rows() || Uhat.cols() != U.cols())
    throw std::invalid_argument("procrustes_align: shape mismatch");
  const Matrix M = U.transpose() * Uhat;
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  AlignmentResult out;
  out.Q = svd.matrixU() * svd.matrixV().transpose();
  out.frobenius_distance = (Uhat - U * out.Q).norm();
  const auto& sv = svd.singularValues();
  out.rank_deficient = sv.size() > 0 && sv[sv.size() - 1] < 1e-12;
  return out;
}

DavisKahanCheck davis_kahan_gap_bound(const Matrix& Uhat, const Matrix& U, double gamma,
                                      double norm_difference) {
  if (!(gamma > 0.0)) throw std::invalid_argument("davis_kahan_gap_bound: gamma must be positive");
  DavisKahanCheck out;
  out.alignment = procrustes_align(Uhat, U);
  out.lhs = out.alignment.frobenius_distance;
  const double K = static_cast<double>(U.cols());
  out.rhs = 2.0 * std::sqrt(2.0 * K) * norm_difference / gamma;
  out.holds = out.lhs <= out.rhs + kInequalitySlack;
  return out;
}

void write_embedding_csv(std::ostream& out, const Matrix& vectors) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
    for (Eigen::Index k = 0; k < vectors.cols(); ++k) {
      if (k) out << ',';
      out << vectors(i, k);
    }
    out << '\n';
  }
  out.precision(old);
}

}  // namespace ssbm
