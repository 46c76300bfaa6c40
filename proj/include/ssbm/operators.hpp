#pragma once

#include "ssbm/model.hpp"
#include "ssbm/sampler.hpp"

#include <functional>

namespace ssbm {

/// Symmetric linear map applied to blocks of column vectors.
///
/// Operators built by the factories below hold references to their
/// arguments, which must outlive the operator.
class SymmetricOperator {
 public:
  using BlockApply = std::function<void(const Matrix& X, Matrix& Y)>;

  SymmetricOperator(int n, BlockApply apply) : n_(n), apply_(std::move(apply)) {}

  int n() const { return n_; }
  /// Y = M X; Y is resized by the callee.
  void apply(const Matrix& X, Matrix& Y) const { apply_(X, Y); }

 private:
  int n_;
  BlockApply apply_;
};

/// Y = A X over the CSR index, rows in parallel.
void adjacency_multiply(const AdjacencyMatrix& A, const Matrix& X, Matrix& Y);
/// Single-threaded reference for `adjacency_multiply`.
void adjacency_multiply_serial(const AdjacencyMatrix& A, const Matrix& X, Matrix& Y);

SymmetricOperator adjacency_operator(const AdjacencyMatrix& A);
SymmetricOperator dense_operator(const Matrix& M);
/// base - U diag(D) U^T, e.g. A - P with P from its rank-K factorization.
SymmetricOperator low_rank_shift(SymmetricOperator base, const Matrix& U, const Vector& D);

}  // namespace ssbm
