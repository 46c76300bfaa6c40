#include "ssbm/cluster.hpp"
#include "ssbm/rng.hpp"

#include <doctest.h>

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

using namespace ssbm;

namespace {

// Relabel clusters in order of first appearance.
std::vector<int> canonical(const std::vector<int>& labels) {
  std::map<int, int> seen;
  std::vector<int> out;
  for (int l : labels) {
    auto [it, inserted] = seen.try_emplace(l, static_cast<int>(seen.size()));
    out.push_back(it->second);
  }
  return out;
}

Matrix random_rows(int n, int dim, Engine& rng) {
  Matrix X(n, dim);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = draw_unit(rng) * 2.0 - 1.0;
  return X;
}

// Well-separated Gaussian-ish blobs so the partition is unambiguous.
Matrix blobs(int per, int K, int dim, Engine& rng, std::vector<int>* truth = nullptr) {
  Matrix X(per * K, dim);
  for (int k = 0; k < K; ++k)
    for (int p = 0; p < per; ++p) {
      const int i = k * per + p;
      for (int c = 0; c < dim; ++c) X(i, c) = (c == k % dim ? 10.0 * (1 + k / dim) : 0.0) + 0.3 * (draw_unit(rng) - 0.5);
      if (truth) truth->push_back(k);
    }
  return X;
}

Matrix random_orthogonal(int K, Engine& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_rows(K, K, rng));
  return qr.householderQ() * Matrix::Identity(K, K);
}

}  // namespace

TEST_CASE("k-means on a one-dimensional example") {
  Matrix X(4, 1);
  X << 0.0, 0.1, 1.0, 1.1;
  const ClusteringResult r = kmeans_approx(X, 2);
  CHECK(r.objective == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(canonical(r.membership.communities()) == std::vector<int>{0, 0, 1, 1});
  CHECK(kmeans_exact(X, 2).objective == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(kmeans_cost(X, r.membership.communities(), r.centers) == doctest::Approx(r.objective));
}

TEST_CASE("K distinct repeated rows give zero cost") {
  Matrix X(9, 2);
  for (int i = 0; i < 9; ++i) X.row(i) << (i % 3), (i % 3) * (i % 3);
  const ClusteringResult r = kmeans_approx(X, 3);
  CHECK(r.objective <= 1e-20);
  for (int i = 0; i < 9; ++i) CHECK(r.membership[i] == r.membership[i % 3]);
}

TEST_CASE("K = 1 places the center at the mean") {
  Engine rng = make_engine({1});
  const Matrix X = random_rows(20, 3, rng);
  const ClusteringResult r = kmeans_approx(X, 1);
  CHECK((r.centers.row(0) - X.colwise().mean()).norm() < 1e-12);
  CHECK(r.objective == doctest::Approx((X.rowwise() - X.colwise().mean()).squaredNorm()));
}

TEST_CASE("objective history is non-increasing") {
  Engine rng = make_engine({2});
  for (int t = 0; t < 30; ++t) {
    const Matrix X = random_rows(60, 3, rng);
    for (const ClusteringResult& r : {kmeans_approx(X, 4), kmedian_approx(X, 4)}) {
      for (std::size_t s = 1; s < r.objective_history.size(); ++s)
        CHECK(r.objective_history[s] <= r.objective_history[s - 1] * (1 + 1e-12) + 1e-15);
      CHECK(r.membership.K() == 4);
      for (int k = 0; k < 4; ++k) CHECK(r.membership.size(k) > 0);
    }
  }
}

TEST_CASE("exact k-means is never worse than the heuristic") {
  Engine rng = make_engine({3});
  int strictly_better = 0;
  for (int t = 0; t < 1000; ++t) {
    const int K = 2 + static_cast<int>(draw_index(rng, 3));
    const int n = K + 1 + static_cast<int>(draw_index(rng, 12 - K));
    const Matrix X = random_rows(n, K, rng);
    ApproxConfig cfg;
    cfg.restarts = 1;
    cfg.seed = t;
    const ClusteringResult exact = kmeans_exact(X, K);
    const ClusteringResult approx = kmeans_approx(X, K, cfg);
    CHECK(exact.objective <= approx.objective * (1 + 1e-12) + 1e-14);
    CHECK(exact.objective == doctest::Approx(kmeans_cost(X, exact.membership.communities(), exact.centers)));
    strictly_better += exact.objective < approx.objective * (1 - 1e-9);
  }
  MESSAGE("single-restart k-means suboptimal on " << strictly_better << " of 1000 instances");
}

TEST_CASE("exact k-median is never worse than the heuristic") {
  Engine rng = make_engine({4});
  for (int t = 0; t < 500; ++t) {
    const int K = 2 + static_cast<int>(draw_index(rng, 2));
    const int n = K + 1 + static_cast<int>(draw_index(rng, 9 - K));
    const Matrix X = random_rows(n, K, rng);
    ApproxConfig cfg;
    cfg.restarts = 2;
    cfg.seed = t;
    const double exact = kmedian_exact(X, K).objective;
    const double approx = kmedian_approx(X, K, cfg).objective;
    CHECK(exact <= approx * (1 + 1e-8) + 1e-12);
  }
}

TEST_CASE("oracle size limits") {
  CHECK_THROWS_AS(kmeans_exact(Matrix::Zero(15, 2), 2), InstanceTooLarge);
  CHECK_THROWS_AS(kmeans_exact(Matrix::Zero(13, 4), 4), InstanceTooLarge);
  CHECK_THROWS_AS(kmedian_exact(Matrix::Zero(13, 2), 2), InstanceTooLarge);
  CHECK_NOTHROW(kmeans_exact(Matrix::Zero(14, 3), 3));
}

TEST_CASE("invalid solver inputs") {
  CHECK_THROWS_AS(kmeans_approx(Matrix::Zero(3, 2), 4), std::invalid_argument);
  ApproxConfig bad;
  bad.restarts = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("geometric median") {
  Matrix two(2, 2);
  two << 0.0, 0.0, 2.0, 4.0;
  const Vector m = geometric_median(two);
  CHECK((m - Eigen::Vector2d(1.0, 2.0)).norm() < 1e-9);
  Matrix X(1, 2);
  X.row(0) = m.transpose();
  const std::vector<int> a{0, 0};
  CHECK(kmedian_cost(two, a, X) == doctest::Approx(std::sqrt(20.0)));

  Matrix same = Matrix::Constant(5, 3, 0.7);
  CHECK(kmedian_exact(same, 1).objective == doctest::Approx(0.0));

  // Majority at a data point: three copies of the origin dominate two far points.
  Matrix maj(5, 2);
  maj << 0, 0, 0, 0, 0, 0, 5, 0, 0, 5;
  CHECK(geometric_median(maj).norm() < 1e-8);

  // Triangle with all angles < 120 degrees: the Fermat point equalizes angles.
  Matrix tri(3, 2);
  tri << 0, 0, 1, 0, 0.5, std::sqrt(3.0) / 2;
  const Vector f = geometric_median(tri);
  CHECK((f - Eigen::Vector2d(0.5, std::sqrt(3.0) / 6)).norm() < 1e-8);
}

TEST_CASE("spherical k-median") {
  SUBCASE("scaled rows on K directions") {
    Matrix U(6, 2);
    U << 1, 0, 3, 0, 0.2, 0, 0, 2, 0, 0.5, 0, 7;
    const SphericalResult r = spherical_kmedian(U, 2);
    CHECK(r.clustering.objective < 1e-9);
    CHECK(canonical(r.clustering.membership.communities()) == std::vector<int>{0, 0, 0, 1, 1, 1});
    CHECK(r.zero_rows.empty());
  }
  SUBCASE("zero row is set aside and labeled community 1") {
    Matrix U(5, 2);
    U << 1, 0, 2, 0, 0, 0, 0, 1, 0, 3;
    const SphericalResult r = spherical_kmedian(U, 2);
    CHECK(r.zero_rows == std::vector<int>{2});
    CHECK(r.positive_rows == std::vector<int>{0, 1, 3, 4});
    CHECK(r.clustering.membership[2] == 0);
    CHECK(r.normalized.row(2).norm() == 0.0);
  }
  SUBCASE("too few nonzero rows") {
    Matrix U = Matrix::Zero(4, 2);
    CHECK_THROWS(spherical_kmedian(U, 2));
    U(0, 0) = 1.0;
    CHECK_THROWS(spherical_kmedian(U, 2));
  }
  SUBCASE("row scaling leaves the partition unchanged") {
    Engine rng = make_engine({5});
    for (int t = 0; t < 20; ++t) {
      const Matrix U = random_rows(40, 3, rng);
      Matrix V = U;
      for (int i = 0; i < 40; ++i) V.row(i) *= std::exp(4.0 * (draw_unit(rng) - 0.5));
      const SphericalResult a = spherical_kmedian(U, 3);
      const SphericalResult b = spherical_kmedian(V, 3);
      CHECK((a.normalized - b.normalized).norm() < 1e-12);
      CHECK(a.positive_rows == b.positive_rows);
      CHECK(canonical(a.clustering.membership.communities()) == canonical(b.clustering.membership.communities()));
    }
  }
}

TEST_CASE("permutation equivariance") {
  Engine rng = make_engine({6});
  std::vector<int> truth;
  const Matrix X = blobs(15, 3, 3, rng, &truth);
  std::vector<int> perm(X.rows());
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[draw_index(rng, i + 1)]);
  Matrix Y(X.rows(), X.cols());
  for (std::size_t i = 0; i < perm.size(); ++i) Y.row(i) = X.row(perm[i]);

  for (bool median : {false, true}) {
    const ClusteringResult a = median ? kmedian_approx(X, 3) : kmeans_approx(X, 3);
    const ClusteringResult b = median ? kmedian_approx(Y, 3) : kmeans_approx(Y, 3);
    std::vector<int> pulled(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) pulled[perm[i]] = b.membership[i];
    CHECK(canonical(a.membership.communities()) == canonical(pulled));
    CHECK(canonical(a.membership.communities()) == canonical(truth));
  }
}

TEST_CASE("rotation invariance") {
  Engine rng = make_engine({7});
  for (int t = 0; t < 20; ++t) {
    const Matrix X = blobs(10, 3, 3, rng);
    const Matrix Q = random_orthogonal(3, rng);
    const Matrix Y = X * Q;
    const ClusteringResult a = kmeans_approx(X, 3);
    const ClusteringResult b = kmeans_approx(Y, 3);
    CHECK(canonical(a.membership.communities()) == canonical(b.membership.communities()));
    CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-9));
    const ClusteringResult c = kmedian_approx(X, 3);
    const ClusteringResult d = kmedian_approx(Y, 3);
    CHECK(canonical(c.membership.communities()) == canonical(d.membership.communities()));
  }
}

TEST_CASE("seeded runs are reproducible") {
  Engine rng = make_engine({8});
  const Matrix X = random_rows(80, 2, rng);
  ApproxConfig cfg;
  cfg.seed = 77;
  const ClusteringResult a = kmeans_approx(X, 3, cfg);
  const ClusteringResult b = kmeans_approx(X, 3, cfg);
  CHECK(a.membership == b.membership);
  CHECK(a.objective == b.objective);
  CHECK(a.best_restart_index == b.best_restart_index);
  const ClusteringResult c = kmedian_approx(X, 3, cfg);
  const ClusteringResult d = kmedian_approx(X, 3, cfg);
  CHECK(c.membership == d.membership);
  CHECK(c.objective == d.objective);
}
