#include "ssbm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ssbm {

namespace {

void check_compatible(const MembershipMatrix& estimate, const MembershipMatrix& truth) {
  if (estimate.n() != truth.n()) throw std::invalid_argument("metrics: memberships differ in n");
  if (estimate.K() != truth.K()) throw std::invalid_argument("metrics: memberships differ in K");
}

}  // namespace

Eigen::MatrixXi confusion_matrix(const MembershipMatrix& estimate, const MembershipMatrix& truth) {
  check_compatible(estimate, truth);
  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(estimate.K(), truth.K());
  for (int i = 0; i < truth.n(); ++i) ++counts(estimate[i], truth[i]);
  return counts;
}

std::vector<int> max_weight_assignment(const Matrix& weights) {
  const int K = static_cast<int>(weights.rows());
  if (weights.cols() != K) throw std::invalid_argument("max_weight_assignment: matrix must be square");
  if (K == 0) return {};
  const double top = weights.maxCoeff();
  // Shortest augmenting paths with potentials on cost = top - weight
  // (1-based arrays, column 0 is the virtual start).
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(K + 1, 0.0), v(K + 1, 0.0);
  std::vector<int> p(K + 1, 0), way(K + 1, 0);
  for (int r = 1; r <= K; ++r) {
    p[0] = r;
    int j0 = 0;
    std::vector<double> minv(K + 1, inf);
    std::vector<bool> used(K + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= K; ++j) {
        if (used[j]) continue;
        const double cur = (top - weights(i0 - 1, j - 1)) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= K; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> col(K);
  for (int j = 1; j <= K; ++j) col[p[j] - 1] = j - 1;
  return col;
}

ErrorL error_L(const MembershipMatrix& estimate, const MembershipMatrix& truth) {
  const Eigen::MatrixXi counts = confusion_matrix(estimate, truth);
  ErrorL out;
  out.J = max_weight_assignment(counts.cast<double>());
  for (int i = 0; i < truth.n(); ++i)
    if (out.J[estimate[i]] != truth[i]) out.mismatched.push_back(i);
  out.L = 2.0 * static_cast<double>(out.mismatched.size()) / truth.n();
  return out;
}

ErrorLTilde error_L_tilde(const MembershipMatrix& estimate, const MembershipMatrix& truth) {
  const int K = truth.K();
  if (K > kMaxEnumeratedK) throw std::invalid_argument("error_L_tilde: K > 10 is not supported");
  const Eigen::MatrixXi counts = confusion_matrix(estimate, truth);
  Permutation J(K);
  std::iota(J.begin(), J.end(), 0);
  ErrorLTilde out;
  out.L_tilde = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (int a = 0; a < K; ++a) {
      const int k = J[a];
      const int nk = truth.size(k);
      worst = std::max(worst, 2.0 * (nk - counts(a, k)) / nk);
    }
    if (worst < out.L_tilde) {
      out.L_tilde = worst;
      out.J = J;
    }
  } while (std::next_permutation(J.begin(), J.end()));
  return out;
}

ErrorReport error_report(const MembershipMatrix& estimate, const MembershipMatrix& truth) {
  ErrorL l = error_L(estimate, truth);
  ErrorLTilde lt = error_L_tilde(estimate, truth);
  ErrorReport rep;
  rep.L = l.L;
  rep.L_tilde = lt.L_tilde;
  rep.J_L = std::move(l.J);
  rep.J_L_tilde = std::move(lt.J);
  rep.per_community_errors.assign(truth.K(), 0);
  for (int i : l.mismatched) ++rep.per_community_errors[truth[i]];
  rep.misclustered_nodes = std::move(l.mismatched);
  return rep;
}

std::vector<double> default_deltas(const MembershipMatrix& truth) {
  const int K = truth.K();
  if (K == 1) return {1.0 / std::sqrt(static_cast<double>(truth.n()))};
  std::vector<double> delta(K);
  for (int k = 0; k < K; ++k) {
    int other = 0;
    for (int l = 0; l < K; ++l)
      if (l != k) other = std::max(other, truth.size(l));
    delta[k] = std::sqrt(1.0 / truth.size(k) + 1.0 / other);
  }
  return delta;
}

ExceptionSets exception_sets(const Matrix& Ubar, const Matrix& U, const MembershipMatrix& truth,
                             std::span<const double> delta) {
  const int n = truth.n();
  const int K = truth.K();
  if (Ubar.rows() != n || U.rows() != n || Ubar.cols() != U.cols())
    throw std::invalid_argument("exception_sets: shape mismatch");
  if (static_cast<int>(delta.size()) != K) throw std::invalid_argument("exception_sets: need one delta per community");

  Matrix X = Matrix::Zero(K, U.cols());
  for (int i = 0; i < n; ++i) X.row(truth[i]) += U.row(i);
  for (int k = 0; k < K; ++k) X.row(k) /= truth.size(k);
  for (int k = 0; k < K; ++k) {
    if (!(delta[k] > 0.0)) throw std::invalid_argument("exception_sets: delta must be positive");
    for (int l = 0; l < K; ++l) {
      if (l == k) continue;
      const double sep = (X.row(k) - X.row(l)).norm();
      if (delta[k] > sep * (1.0 + 1e-9) + 1e-12)
        throw std::invalid_argument("exception_sets: delta exceeds community separation");
    }
  }

  ExceptionSets out;
  out.sets.assign(K, {});
  for (int i = 0; i < n; ++i) {
    const int k = truth[i];
    if ((Ubar.row(i) - U.row(i)).norm() >= delta[k] / 2.0)
      out.sets[k].push_back(i);
    else
      out.correct_nodes.push_back(i);
  }
  for (int k = 0; k < K; ++k) {
    const double s = static_cast<double>(out.sets[k].size());
    out.weighted_count += s * delta[k] * delta[k];
    out.relative_count += s / truth.size(k);
  }
  return out;
}

bool labels_agree_on(const MembershipMatrix& estimate, const MembershipMatrix& truth,
                     std::span<const int> nodes) {
  check_compatible(estimate, truth);
  const int K = truth.K();
  std::vector<int> forward(K, -1), backward(K, -1);
  for (int i : nodes) {
    const int a = estimate[i];
    const int b = truth[i];
    if (forward[a] == -1 && backward[b] == -1) {
      forward[a] = b;
      backward[b] = a;
    } else if (forward[a] != b || backward[b] != a) {
      return false;
    }
  }
  return true;
}

}  // namespace ssbm
