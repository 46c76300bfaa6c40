#pragma once

#include "ssbm/model.hpp"
#include "ssbm/operators.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ssbm {

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, int iterations)
      : std::runtime_error(what + " after " + std::to_string(iterations) + " iterations"),
        iterations_(iterations) {}
  int iterations() const { return iterations_; }

 private:
  int iterations_;
};

enum class EigenMethod { automatic, dense, iterative };

struct EigenConfig {
  /// Residual tolerance relative to the largest |Ritz value|.
  double tolerance = 1e-8;
  /// Block expansions before giving up.
  int max_iterations = 3000;
  /// Krylov basis columns kept before a thick restart (0 selects a default).
  int max_basis = 0;
  /// Columns added per expansion (0 selects nev + 2).
  int block_size = 0;
  /// `automatic` uses the dense solver up to this size.
  int dense_max_n = 600;
  EigenMethod method = EigenMethod::automatic;
  std::uint64_t seed = 0x51ed5eedULL;
};

/// Eigenpairs ordered by decreasing |value|; equal magnitudes put the
/// algebraically larger value first.
struct EigenPairs {
  Vector values;
  Matrix vectors;
  Vector residuals;  ///< ||M v - value v|| per pair
  /// (nev+1)-th value in the same ordering, when one exists. Approximate on
  /// the iterative path.
  double next_value = 0.0;
  bool has_next = false;
  int iterations = 0;
  double norm_estimate = 0.0;
  EigenMethod method = EigenMethod::dense;
};

/// Dense reference: full symmetric eigendecomposition, then selection.
EigenPairs dense_extremal_eigenpairs(const Matrix& M, int nev);

/// Block Krylov iteration with full orthogonalization, Rayleigh-Ritz
/// extraction at both ends of the spectrum, and thick restart.
/// Throws ConvergenceError when `max_iterations` is exhausted.
EigenPairs iterative_extremal_eigenpairs(const SymmetricOperator& op, int nev,
                                         const EigenConfig& cfg = {});

}  // namespace ssbm
