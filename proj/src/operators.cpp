#include "ssbm/operators.hpp"

namespace ssbm {

namespace {

inline void multiply_row(const AdjacencyMatrix& A, const Matrix& X, Matrix& Y, int i) {
  Y.row(i).setZero();
  for (int j : A.neighbors(i)) Y.row(i) += X.row(j);
}

}  // namespace

void adjacency_multiply(const AdjacencyMatrix& A, const Matrix& X, Matrix& Y) {
  Y.resize(A.n(), X.cols());
  const int n = A.n();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) multiply_row(A, X, Y, i);
}

void adjacency_multiply_serial(const AdjacencyMatrix& A, const Matrix& X, Matrix& Y) {
  Y.resize(A.n(), X.cols());
  for (int i = 0; i < A.n(); ++i) multiply_row(A, X, Y, i);
}

SymmetricOperator adjacency_operator(const AdjacencyMatrix& A) {
  return SymmetricOperator(A.n(), [&A](const Matrix& X, Matrix& Y) { adjacency_multiply(A, X, Y); });
}

SymmetricOperator dense_operator(const Matrix& M) {
  return SymmetricOperator(static_cast<int>(M.rows()), [&M](const Matrix& X, Matrix& Y) {
    Y.noalias() = M.selfadjointView<Eigen::Lower>() * X;
  });
}

SymmetricOperator low_rank_shift(SymmetricOperator base, const Matrix& U, const Vector& D) {
  const int n = base.n();
  return SymmetricOperator(n, [base = std::move(base), &U, &D](const Matrix& X, Matrix& Y) {
    base.apply(X, Y);
    const Matrix coeff = D.asDiagonal() * (U.transpose() * X);
    Y.noalias() -= U * coeff;
  });
}

}  // namespace ssbm
