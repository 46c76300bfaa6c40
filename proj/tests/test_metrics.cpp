#include "ssbm/metrics.hpp"
#include "ssbm/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace ssbm;

namespace {

MembershipMatrix labels(std::vector<int> c, int K, bool nonempty = true) { return MembershipMatrix(std::move(c), K, nonempty); }

// Independent brute force over all K! permutations.
struct Brute {
  double L;
  double L_tilde;
};

Brute brute_force(const MembershipMatrix& est, const MembershipMatrix& truth) {
  const int K = truth.K(), n = truth.n();
  std::vector<int> J(K);
  std::iota(J.begin(), J.end(), 0);
  Brute best{1e300, 1e300};
  do {
    int mism = 0;
    std::vector<int> per(K, 0);
    for (int i = 0; i < n; ++i)
      if (J[est[i]] != truth[i]) {
        ++mism;
        ++per[truth[i]];
      }
    double worst = 0.0;
    for (int k = 0; k < K; ++k) worst = std::max(worst, 2.0 * per[k] / truth.size(k));
    best.L = std::min(best.L, 2.0 * mism / n);
    best.L_tilde = std::min(best.L_tilde, worst);
  } while (std::next_permutation(J.begin(), J.end()));
  return best;
}

MembershipMatrix random_truth(int n, int K, Engine& rng) {
  std::vector<int> c(n);
  for (int i = 0; i < n; ++i) c[i] = i < K ? i : static_cast<int>(draw_index(rng, K));
  return labels(c, K);
}

MembershipMatrix noisy(const MembershipMatrix& truth, double flip, Engine& rng) {
  std::vector<int> c = truth.communities();
  for (int& v : c)
    if (draw_unit(rng) < flip) v = static_cast<int>(draw_index(rng, truth.K()));
  return labels(c, truth.K(), false);
}

}  // namespace

TEST_CASE("identical and relabeled estimates have zero error") {
  const MembershipMatrix t = labels({0, 0, 1, 1, 2, 2}, 3);
  const ErrorL e = error_L(t, t);
  CHECK(e.L == 0.0);
  CHECK(e.J == Permutation{0, 1, 2});
  CHECK(error_L_tilde(t, t).L_tilde == 0.0);
  const MembershipMatrix p = labels({2, 2, 0, 0, 1, 1}, 3);
  CHECK(error_L(p, t).L == 0.0);
  CHECK(error_L(p, t).J == Permutation{1, 2, 0});
  CHECK(error_L_tilde(p, t).L_tilde == 0.0);
}

TEST_CASE("one flipped node among four") {
  const MembershipMatrix t = labels({0, 0, 1, 1}, 2);
  const ErrorL e = error_L(labels({0, 1, 1, 1}, 2), t);
  CHECK(e.L == doctest::Approx(0.5));
  CHECK(e.mismatched == std::vector<int>{1});
}

TEST_CASE("unbalanced communities") {
  std::vector<int> c(10, 0);
  c[8] = c[9] = 1;
  const MembershipMatrix t = labels(c, 2);
  std::vector<int> est = c;
  est[9] = 0;
  const ErrorReport r = error_report(labels(est, 2), t);
  CHECK(r.L == doctest::Approx(0.2));
  CHECK(r.L_tilde == doctest::Approx(1.0));
  CHECK(r.per_community_errors == std::vector<int>{0, 1});
  CHECK(r.misclustered_nodes == std::vector<int>{9});

  const ErrorReport all = error_report(labels(std::vector<int>(10, 0), 2, false), t);
  CHECK(all.L_tilde == doctest::Approx(2.0));
  CHECK(all.L == doctest::Approx(0.4));
}

TEST_CASE("mismatched shapes are rejected") {
  const MembershipMatrix t = labels({0, 1, 1}, 2);
  CHECK_THROWS_AS(error_L(labels({0, 1}, 2), t), std::invalid_argument);
  CHECK_THROWS_AS(error_L(labels({0, 1, 2}, 3), t), std::invalid_argument);
  CHECK_THROWS_AS(error_L_tilde(labels({0, 1, 2}, 3), t), std::invalid_argument);
  std::vector<int> big(11);
  std::iota(big.begin(), big.end(), 0);
  CHECK_THROWS_AS(error_L_tilde(labels(big, 11), labels(big, 11)), std::invalid_argument);
}

TEST_CASE("Hungarian matches a brute-force oracle") {
  Engine rng = make_engine({11});
  for (int t = 0; t < 1000; ++t) {
    const int K = 1 + static_cast<int>(draw_index(rng, 6));
    const int n = K + static_cast<int>(draw_index(rng, 40));
    const MembershipMatrix truth = random_truth(n, K, rng);
    const MembershipMatrix est = noisy(truth, draw_unit(rng), rng);
    const Brute b = brute_force(est, truth);
    const ErrorReport r = error_report(est, truth);
    CHECK(r.L == doctest::Approx(b.L).epsilon(1e-15));
    CHECK(r.L_tilde == doctest::Approx(b.L_tilde).epsilon(1e-15));
    CHECK(r.L <= r.L_tilde + 1e-15);
    CHECK(r.L_tilde <= 2.0);
    CHECK(r.L == doctest::Approx(2.0 * r.misclustered_nodes.size() / n));
  }
}

TEST_CASE("assignment on a weight matrix") {
  Matrix W(3, 3);
  W << 1, 9, 2, 8, 7, 1, 3, 3, 3;
  CHECK(max_weight_assignment(W) == std::vector<int>{1, 0, 2});
}

TEST_CASE("symmetry and node-permutation invariance") {
  Engine rng = make_engine({12});
  for (int t = 0; t < 200; ++t) {
    const int K = 2 + static_cast<int>(draw_index(rng, 4));
    const int n = 3 * K + static_cast<int>(draw_index(rng, 30));
    const MembershipMatrix a = random_truth(n, K, rng);
    const MembershipMatrix b = random_truth(n, K, rng);
    CHECK(error_L(a, b).L == error_L(b, a).L);

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[draw_index(rng, i + 1)]);
    std::vector<int> pa(n), pb(n);
    for (int i = 0; i < n; ++i) {
      pa[i] = a[perm[i]];
      pb[i] = b[perm[i]];
    }
    CHECK(error_L(labels(pa, K), labels(pb, K)).L == error_L(a, b).L);
    CHECK(error_L_tilde(labels(pa, K), labels(pb, K)).L_tilde == error_L_tilde(a, b).L_tilde);
  }
}

TEST_CASE("confusion matrix counts") {
  const Eigen::MatrixXi C = confusion_matrix(labels({0, 0, 1, 1}, 2), labels({0, 1, 1, 1}, 2));
  CHECK(C(0, 0) == 1);
  CHECK(C(0, 1) == 1);
  CHECK(C(1, 1) == 2);
  CHECK(C(1, 0) == 0);
}

TEST_CASE("default radii") {
  const std::vector<double> d = default_deltas(labels({0, 0, 0, 1}, 2));
  CHECK(d[0] == doctest::Approx(std::sqrt(1.0 / 3 + 1.0)));
  CHECK(d[1] == doctest::Approx(std::sqrt(1.0 + 1.0 / 3)));
  CHECK(default_deltas(labels({0, 0, 0, 0}, 1))[0] == doctest::Approx(0.5));
}

TEST_CASE("exception sets") {
  const MembershipMatrix t = labels({0, 0, 1, 1}, 2);
  Matrix U(4, 2);
  const double s = 1.0 / std::sqrt(2.0);
  U << s, 0, s, 0, 0, s, 0, s;
  const std::vector<double> delta = default_deltas(t);

  SUBCASE("exact rows give empty sets") {
    const ExceptionSets e = exception_sets(U, U, t, delta);
    for (const auto& S : e.sets) CHECK(S.empty());
    CHECK(e.weighted_count == 0.0);
    CHECK(e.correct_nodes == std::vector<int>{0, 1, 2, 3});
  }
  SUBCASE("perturbation of exactly half the radius is inclusive") {
    Matrix Ubar = U;
    Ubar(2, 0) += delta[1] / 2;
    const ExceptionSets e = exception_sets(Ubar, U, t, delta);
    CHECK(e.sets[1] == std::vector<int>{2});
    CHECK(e.sets[0].empty());
    CHECK(e.weighted_count == doctest::Approx(delta[1] * delta[1]));
    CHECK(e.relative_count == doctest::Approx(0.5));

    Matrix inside = U;
    inside(2, 0) += delta[1] / 2 * (1 - 1e-9);
    CHECK(exception_sets(inside, U, t, delta).sets[1].empty());
  }
  SUBCASE("radius above the separation is rejected") {
    std::vector<double> big = delta;
    big[0] *= 1.01;
    CHECK_THROWS_AS(exception_sets(U, U, t, big), std::invalid_argument);
    CHECK_THROWS_AS(exception_sets(U, U, t, std::vector<double>{0.0, delta[1]}), std::invalid_argument);
  }
}

TEST_CASE("label agreement on a node subset") {
  const MembershipMatrix t = labels({0, 0, 1, 1}, 2);
  const MembershipMatrix e = labels({1, 0, 0, 0}, 2);
  CHECK(labels_agree_on(e, t, std::vector<int>{1, 2, 3}) == false);
  CHECK(labels_agree_on(e, t, std::vector<int>{0, 2, 3}));
  CHECK(labels_agree_on(e, t, std::vector<int>{}));
}
