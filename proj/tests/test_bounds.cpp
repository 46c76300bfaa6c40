#include "ssbm/bounds.hpp"
#include "ssbm/rng.hpp"
#include "ssbm/sampler.hpp"
#include "ssbm/spectral.hpp"

#include <doctest.h>

#include <cmath>

using namespace ssbm;

namespace {

BoundInputs sbm_inputs() {
  BoundInputs in;
  in.n = 1000;
  in.K = 2;
  in.rank = 2;
  in.alpha = 0.05;
  in.gamma = 12.5;
  in.lambda = 0.5;
  in.epsilon = 0.5;
  in.n_min = 500;
  in.n_max = 500;
  in.n_max_second = 500;
  in.d = 50;
  in.sizes = {500, 500};
  in.nu = {1.0, 1.0};
  in.n_tilde_min = 500;
  in.weighted_heterogeneity = 2.0 * 500 * 500;
  in.C = 3.0;
  in.observed = 0.01;
  return in;
}

}  // namespace

TEST_CASE("constants from C") {
  CHECK(c_sbm(2.0) == doctest::Approx(1.0 / 256));
  CHECK(c_dcbm(2.0) == doctest::Approx(1.0 / 16));
}

TEST_CASE("SBM condition and bound formulas") {
  const BoundInputs in = sbm_inputs();
  const BoundPair p = sbm_condition_and_bound(in);
  const double ratio = 2.5 * 2 * 1000 * 0.05 / (12.5 * 12.5);
  CHECK(p.condition.lhs == doctest::Approx(ratio));
  CHECK(p.condition.rhs == doctest::Approx(c_sbm(3.0)));
  CHECK(p.bound.rhs == doctest::Approx(ratio / c_sbm(3.0)));
  CHECK(p.bound.lhs == 0.01);
  CHECK(p.bound.holds);
  CHECK_FALSE(p.condition.holds);

  BoundInputs explicit_c = in;
  explicit_c.c_override = 0.25;
  CHECK(evaluate_bound("sbm_condition", explicit_c).rhs == 0.25);
  CHECK(evaluate_bound("sbm_condition", explicit_c).c_used == 0.25);
}

TEST_CASE("corollary ratios use n for L-tilde and n'_max for L") {
  BoundInputs in = sbm_inputs();
  in.sizes = {700, 300};
  in.n_min = 300;
  in.n_max = 700;
  in.n_max_second = 300;
  const CorollaryBounds b = sbm_corollary_bounds(in, 0.3, 0.1);
  const double base = 2.5 * 2 / (300.0 * 300 * 0.25 * 0.05);
  CHECK(b.condition.lhs == doctest::Approx(base * 1000));
  CHECK(b.L_tilde.rhs == doctest::Approx(base * 1000 / c_sbm(3.0)));
  CHECK(b.L.rhs == doctest::Approx(base * 300 / c_sbm(3.0)));
  CHECK(b.L_tilde.lhs == 0.3);
  CHECK(b.L.lhs == 0.1);
}

TEST_CASE("scaling relations") {
  const BoundInputs in = sbm_inputs();
  SUBCASE("doubling gamma quarters the SBM ratio") {
    BoundInputs g = in;
    g.gamma *= 2;
    CHECK(evaluate_bound("sbm_bound", g).rhs == doctest::Approx(evaluate_bound("sbm_bound", in).rhs / 4));
  }
  SUBCASE("doubling n_min quarters the L-tilde bound") {
    BoundInputs m = in;
    m.n_min *= 2;
    CHECK(evaluate_bound("sbm_corollary_L_tilde", m).rhs ==
          doctest::Approx(evaluate_bound("sbm_corollary_L_tilde", in).rhs / 4));
  }
  SUBCASE("quadrupling heterogeneity doubles the DCBM bound") {
    BoundInputs h = in;
    h.weighted_heterogeneity *= 4;
    CHECK(evaluate_bound("dcbm_bound", h).rhs == doctest::Approx(evaluate_bound("dcbm_bound", in).rhs * 2));
    CHECK(evaluate_bound("dcbm_corollary_bound", h).rhs ==
          doctest::Approx(evaluate_bound("dcbm_corollary_bound", in).rhs * 2));
  }
  SUBCASE("bounds grow with the degree scale and shrink with gamma") {
    double prev = 0.0;
    for (double a : {0.01, 0.02, 0.04, 0.08}) {
      BoundInputs x = in;
      x.alpha = a;
      const double r = evaluate_bound("sbm_bound", x).rhs;
      CHECK(r > prev);
      prev = r;
    }
    prev = 1e300;
    for (double g : {5.0, 10.0, 20.0}) {
      BoundInputs x = in;
      x.gamma = g;
      const double r = evaluate_bound("dcbm_bound", x).rhs;
      CHECK(r < prev);
      prev = r;
    }
  }
}

TEST_CASE("homogeneous propensity relates the DCBM bound to the SBM ratio") {
  const ModelSpec spec = preset_planted_partition(400, 2, 0.1, 0.5, balanced_sizes(400, 2));
  const PopulationEigen pop = population_eigen(spec);
  const BoundInputs in = model_bound_inputs(spec, pop, 0.5, 2.0);
  CHECK(in.weighted_heterogeneity == doctest::Approx(2.0 * 200 * 200));
  for (double v : in.nu) CHECK(v == doctest::Approx(1.0));
  // With W = n^2 / K: sqrt(W) sqrt(K alpha) / (gamma sqrt n) = sqrt(n alpha) / gamma.
  const double dc = evaluate_bound("dcbm_bound", in).rhs * c_dcbm(2.0) / 3.0;
  const double sb = evaluate_bound("sbm_condition", in).lhs / 2.5;
  CHECK(dc * dc * 2 == doctest::Approx(sb));
  CHECK(in.lambda == 0.5);
}

TEST_CASE("rate reference for a homogeneous model") {
  BoundInputs in = sbm_inputs();
  in.nu = {1.0, 2.25};
  const BoundReport r = evaluate_bound("dcbm_rate_reference", in);
  CHECK(r.rhs == doctest::Approx(1000 * 1.5 / (500 * 0.5 * std::sqrt(50.0))));
  CHECK(std::isnan(r.c_used));
}

TEST_CASE("invalid inputs") {
  BoundInputs in = sbm_inputs();
  CHECK_THROWS_AS(evaluate_bound("no_such_bound", in), std::invalid_argument);
  BoundInputs low_rank = in;
  low_rank.rank = 1;
  CHECK_THROWS_AS(evaluate_bound("sbm_condition", low_rank), std::invalid_argument);
  BoundInputs no_c = in;
  no_c.C = BoundInputs::nan;
  CHECK_THROWS_AS(evaluate_bound("sbm_bound", no_c), std::invalid_argument);
  BoundInputs no_lambda = in;
  no_lambda.lambda = BoundInputs::nan;
  CHECK_THROWS_AS(evaluate_bound("sbm_corollary_condition", no_lambda), std::invalid_argument);
  BoundInputs bad_het = in;
  bad_het.weighted_heterogeneity = BoundInputs::nan;
  CHECK_THROWS_AS(evaluate_bound("dcbm_condition", bad_het), std::invalid_argument);
}

TEST_CASE("holds and near-boundary flags") {
  BoundInputs in = sbm_inputs();
  in.c_override = 1.0;
  in.observed = evaluate_bound("sbm_bound", in).rhs;
  BoundReport r = evaluate_bound("sbm_bound", in);
  CHECK(r.holds);
  CHECK(r.near_boundary);
  in.observed = r.rhs * 1.02;
  r = evaluate_bound("sbm_bound", in);
  CHECK_FALSE(r.holds);
  CHECK_FALSE(r.near_boundary);
  in.observed = r.rhs * 1.005;
  r = evaluate_bound("sbm_bound", in);
  CHECK_FALSE(r.holds);
  CHECK(r.near_boundary);
}

TEST_CASE("reevaluation reproduces reports bit for bit") {
  Engine rng = make_engine({17});
  const char* names[] = {"sbm_condition", "sbm_bound", "sbm_corollary_condition", "sbm_corollary_L_tilde",
                         "sbm_corollary_L", "dcbm_condition", "dcbm_bound", "dcbm_corollary_condition",
                         "dcbm_corollary_bound", "dcbm_rate_reference", "dcbm_exception_count"};
  for (int t = 0; t < 200; ++t) {
    BoundInputs in = sbm_inputs();
    in.alpha = 0.01 + 0.5 * draw_unit(rng);
    in.gamma = 1 + 50 * draw_unit(rng);
    in.epsilon = draw_unit(rng);
    in.C = 0.5 + 3 * draw_unit(rng);
    in.observed = draw_unit(rng);
    for (const char* name : names) {
      const BoundReport r = evaluate_bound(name, in);
      const BoundReport again = reevaluate(r);
      CHECK(again.lhs == r.lhs);
      CHECK(again.rhs == r.rhs);
      CHECK(again.holds == r.holds);
    }
  }
}

TEST_CASE("Hamming lemma with exact rows") {
  const ModelSpec spec = preset_planted_partition(60, 3, 0.5, 0.5, balanced_sizes(60, 3));
  const PopulationEigen pop = population_eigen(spec);
  const ClusteringResult km = kmeans_approx(pop.U, 3);
  const HammingCheck h = lemma_hamming_check(pop.U, pop.U, km, spec.membership(), 0.0, true);
  CHECK(h.inequality.lhs == doctest::Approx(0.0));
  CHECK(h.inequality.holds);
  CHECK(h.recovery.holds);
  CHECK(h.agreement_checked);
  CHECK(h.agreement);
  CHECK(h.sets.correct_nodes.size() == 60);
}

TEST_CASE("Hamming lemma on sampled graphs with certified epsilon") {
  Engine rng = make_engine({19});
  for (int t = 0; t < 40; ++t) {
    const int n = 8 + static_cast<int>(draw_index(rng, 5));
    const ModelSpec spec = preset_planted_partition(n, 2, 0.5 + 0.5 * draw_unit(rng) * 0.99, 0.5, balanced_sizes(n, 2));
    const PopulationEigen pop = population_eigen(spec);
    const AdjacencyMatrix A = sample_adjacency(spec, {19, static_cast<std::uint64_t>(t)});
    const Matrix Uhat = leading_eigenvectors(A, 2).vectors;
    const ClusteringResult exact = kmeans_exact(Uhat, 2);
    const HammingCheck h = lemma_hamming_check(Uhat, pop.U, exact, spec.membership(), 0.0, true);
    CHECK(h.inequality.holds);
    if (h.agreement_checked) CHECK(h.agreement);
  }
}

TEST_CASE("zero rows lemma") {
  const MembershipMatrix m = MembershipMatrix::from_sizes(std::vector<int>{3, 3});
  Matrix B(2, 2);
  B << 0.6, 0.1, 0.1, 0.6;
  const ModelSpec spec(m, ConnectivityMatrix(B), DegreeParams::normalized({1, 0.5, 0.8, 1, 1, 0.4}, m));
  const PopulationEigen pop = population_eigen(spec);
  const HeterogeneityStats stats = heterogeneity_stats(spec);
  CHECK(lemma_zero_rows_check(pop.U, pop.U, m, stats).lhs == 0.0);
  Matrix Uhat = pop.U;
  Uhat.row(1).setZero();
  const BoundReport r = lemma_zero_rows_check(Uhat, pop.U, m, stats);
  CHECK(r.lhs == 1.0);
  CHECK(r.holds);
}

TEST_CASE("DCBM proof sets at the inclusive threshold") {
  Matrix U(4, 2);
  U << 1, 0, 2, 0, 0, 1, 0, 3;
  SphericalResult res;
  res.positive_rows = {0, 1, 2, 3};
  res.clustering.membership = MembershipMatrix({0, 0, 1, 1}, 2);
  res.clustering.centers = Matrix(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  // Center 0 sits exactly 1/sqrt2 away from (1, 0) along the second axis.
  res.clustering.centers << 1, s, 0, 1;
  BoundInputs in = sbm_inputs();
  const DcbmProofSets p = dcbm_proof_sets(res, U, in);
  CHECK(p.S == std::vector<int>{0, 1});
  CHECK(p.report.lhs == 2.0);
  res.clustering.centers(0, 1) = s * (1 - 1e-9);
  CHECK(dcbm_proof_sets(res, U, in).S.empty());
}

TEST_CASE("concentration study") {
  SUBCASE("complete graph has unit norm") {
    const ConcentrationStudy s = spectral_concentration_study({{50, 1.0, 50.0}}, 3, 1);
    REQUIRE(s.cells.size() == 1);
    for (double r : s.cells[0].ratios) CHECK(r == doctest::Approx(1.0 / std::sqrt(50.0)).epsilon(1e-9));
    CHECK(s.C_empirical == doctest::Approx(1.0 / std::sqrt(50.0)).epsilon(1e-9));
  }
  SUBCASE("degree below the floor") {
    CHECK_THROWS_AS(spectral_concentration_study({{100, 2.0, 3.0}}, 2, 1), std::invalid_argument);
  }
  SUBCASE("summary statistics and determinism") {
    const std::vector<ConcentrationCell> cells{{200, 5.0, std::nullopt}, {400, 5.0, std::nullopt}};
    const ConcentrationStudy a = spectral_concentration_study(cells, 6, 9);
    const ConcentrationStudy b = spectral_concentration_study(cells, 6, 9);
    REQUIRE(a.cells.size() == 2);
    CHECK(a.cells[0].ratios == b.cells[0].ratios);
    CHECK(a.cells[0].d == doctest::Approx(5.0 * std::log(200.0)));
    CHECK(a.cells[1].q50 <= a.cells[1].q90);
    CHECK(a.cells[1].q90 <= a.cells[1].max_ratio);
    CHECK(a.C_empirical == std::max(a.cells[0].max_ratio, a.cells[1].max_ratio));
  }
}

TEST_CASE("quantile interpolation") {
  CHECK(quantile({3, 1, 2, 4}, 0.5) == doctest::Approx(2.5));
  CHECK(quantile({1}, 0.9) == 1.0);
  CHECK(quantile({0, 10}, 0.9) == doctest::Approx(9.0));
  CHECK_THROWS(quantile({}, 0.5));
}

TEST_CASE("reference rate") {
  BoundInputs in = sbm_inputs();
  CHECK(mcsherry_reference(in) == doctest::Approx(0.25 * 0.05 * 0.05 * 1000 / (0.05 * 0.95 * std::log(1000.0))));
  in.alpha = 1.0;
  CHECK(std::isnan(mcsherry_reference(in)));
}
