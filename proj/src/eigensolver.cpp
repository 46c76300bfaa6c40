#include "ssbm/eigensolver.hpp"

#include "ssbm/rng.hpp"

#include <algorithm>
#include <cmath>

namespace ssbm {

namespace {

void fill_random(Engine& rng, Eigen::Ref<Matrix> X) {
  for (Eigen::Index c = 0; c < X.cols(); ++c)
    for (Eigen::Index r = 0; r < X.rows(); ++r) X(r, c) = draw_unit(rng) - 0.5;
}

// Orthonormalizes X against V and internally. Columns that vanish are
// replaced by fresh random directions; columns that cannot be completed
// (the basis already spans the space) are dropped.
void orthonormalize_block(const Matrix& V, Matrix& X, Engine& rng) {
  const Eigen::Index n = X.rows();
  Eigen::Index kept = 0;
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    if (V.cols() + kept >= n) break;
    Vector x = X.col(c);
    bool ok = false;
    for (int attempt = 0; attempt < 4 && !ok; ++attempt) {
      const double before = x.norm();
      for (int pass = 0; pass < 2; ++pass) {
        if (V.cols() > 0) x -= V * (V.transpose() * x);
        if (kept > 0) x -= X.leftCols(kept) * (X.leftCols(kept).transpose() * x);
      }
      const double after = x.norm();
      if (after > 1e-8 * before && after > 0.0) {
        X.col(kept++) = x / after;
        ok = true;
      } else {
        for (Eigen::Index r = 0; r < n; ++r) x[r] = draw_unit(rng) - 0.5;
      }
    }
  }
  X.conservativeResize(n, kept);
}

EigenPairs select_pairs(const Vector& all_values, const Matrix& all_vectors, int nev) {
  const std::vector<int> order = order_by_magnitude(all_values);
  EigenPairs out;
  out.values.resize(nev);
  out.vectors.resize(all_vectors.rows(), nev);
  for (int c = 0; c < nev; ++c) {
    out.values[c] = all_values[order[c]];
    out.vectors.col(c) = all_vectors.col(order[c]);
  }
  if (static_cast<int>(order.size()) > nev) {
    out.has_next = true;
    out.next_value = all_values[order[nev]];
  }
  out.norm_estimate = order.empty() ? 0.0 : std::abs(all_values[order[0]]);
  return out;
}

}  // namespace

EigenPairs dense_extremal_eigenpairs(const Matrix& M, int nev) {
  if (M.rows() != M.cols()) throw std::invalid_argument("eigen: matrix must be square");
  if (nev < 1 || nev > M.rows()) throw std::invalid_argument("eigen: need 1 <= nev <= n");
  Eigen::SelfAdjointEigenSolver<Matrix> es(M);
  EigenPairs out = select_pairs(es.eigenvalues(), es.eigenvectors(), nev);
  const Matrix R = M * out.vectors - out.vectors * out.values.asDiagonal();
  out.residuals = R.colwise().norm().transpose();
  out.method = EigenMethod::dense;
  out.iterations = 1;
  return out;
}

EigenPairs iterative_extremal_eigenpairs(const SymmetricOperator& op, int nev, const EigenConfig& cfg) {
  const int n = op.n();
  if (nev < 1 || nev > n) throw std::invalid_argument("eigen: need 1 <= nev <= n");
  const int block = std::min(cfg.block_size > 0 ? cfg.block_size : nev + 2, n);
  int max_basis = cfg.max_basis > 0 ? cfg.max_basis : std::max(10 * (nev + block), 160);
  max_basis = std::max(max_basis, 2 * (nev + block) + block);

  // Small operators: materialize and solve densely.
  if (n <= std::max(max_basis, 64)) {
    Matrix M;
    op.apply(Matrix::Identity(n, n), M);
    const Matrix sym = 0.5 * (M + M.transpose());
    EigenPairs out = dense_extremal_eigenpairs(sym, nev);
    out.method = EigenMethod::iterative;
    return out;
  }

  Engine rng = make_engine({cfg.seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(nev)});
  Matrix V(n, 0), AV(n, 0), H(0, 0);
  Matrix X(n, block);
  fill_random(rng, X);

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    orthonormalize_block(V, X, rng);
    const Eigen::Index added = X.cols();
    const Eigen::Index m0 = V.cols();
    if (added > 0) {
      Matrix AX;
      op.apply(X, AX);
      Matrix Hn(m0 + added, m0 + added);
      Hn.topLeftCorner(m0, m0) = H;
      const Matrix cross = V.transpose() * AX;
      Hn.topRightCorner(m0, added) = cross;
      Hn.bottomLeftCorner(added, m0) = cross.transpose();
      const Matrix diag_block = X.transpose() * AX;
      Hn.bottomRightCorner(added, added) = 0.5 * (diag_block + diag_block.transpose());
      H = std::move(Hn);
      V.conservativeResize(n, m0 + added);
      V.rightCols(added) = X;
      AV.conservativeResize(n, m0 + added);
      AV.rightCols(added) = AX;
    }
    const Eigen::Index m = V.cols();

    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    const std::vector<int> order = order_by_magnitude(es.eigenvalues());
    const int track = static_cast<int>(std::min<Eigen::Index>(m, nev + block));
    Matrix S(m, track);
    Vector theta(track);
    for (int c = 0; c < track; ++c) {
      S.col(c) = es.eigenvectors().col(order[c]);
      theta[c] = es.eigenvalues()[order[c]];
    }
    const Matrix Y = V * S;
    const Matrix R = AV * S - Y * theta.asDiagonal();
    const Vector res = R.colwise().norm().transpose();
    const double norm_estimate = std::abs(es.eigenvalues()[order[0]]);
    const double threshold = cfg.tolerance * std::max(norm_estimate, 1e-300);

    bool done = (m == n) || added == 0;
    if (!done) {
      done = true;
      for (int c = 0; c < nev; ++c) done = done && res[c] <= threshold;
    }
    if (done) {
      EigenPairs out;
      out.values = theta.head(nev);
      out.vectors = Y.leftCols(nev);
      out.residuals = res.head(nev);
      out.has_next = track > nev;
      if (out.has_next) out.next_value = theta[nev];
      out.iterations = it;
      out.norm_estimate = norm_estimate;
      out.method = EigenMethod::iterative;
      return out;
    }

    // Next block: residuals of the leading unconverged Ritz pairs.
    std::vector<int> pick;
    for (int c = 0; c < track && static_cast<int>(pick.size()) < block; ++c)
      if (res[c] > threshold) pick.push_back(c);
    X.resize(n, block);
    for (std::size_t c = 0; c < pick.size(); ++c) X.col(c) = R.col(pick[c]);
    if (static_cast<int>(pick.size()) < block)
      fill_random(rng, X.rightCols(block - static_cast<Eigen::Index>(pick.size())));

    if (m + block > max_basis) {
      const int keep = static_cast<int>(std::min<Eigen::Index>(m, std::max(nev + block, max_basis / 2)));
      Matrix Sk(m, keep);
      Vector tk(keep);
      for (int c = 0; c < keep; ++c) {
        Sk.col(c) = es.eigenvectors().col(order[c]);
        tk[c] = es.eigenvalues()[order[c]];
      }
      V = V * Sk;
      AV = AV * Sk;
      H = tk.asDiagonal();
    }
  }
  throw ConvergenceError("eigen: block Krylov iteration did not converge", cfg.max_iterations);
}

}  // namespace ssbm
