#include "ssbm/operators.hpp"
#include "ssbm/rng.hpp"
#include "ssbm/sampler.hpp"
#include "ssbm/spectral.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>
#include <sstream>

using namespace ssbm;

namespace {

Matrix random_orthogonal(int K, Engine& rng) {
  Matrix G(K, K);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) G(i, j) = draw_unit(rng) - 0.5;
  Eigen::HouseholderQR<Matrix> qr(G);
  return qr.householderQ() * Matrix::Identity(K, K);
}

double dense_spectral_norm(const Matrix& M) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(M, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff();
}

void check_orthonormal(const Matrix& V, double tol) {
  CHECK((V.transpose() * V - Matrix::Identity(V.cols(), V.cols())).norm() <= tol);
}

}  // namespace

TEST_CASE("two-node graph orders +1 before -1") {
  const AdjacencyMatrix A(2, {{0, 1}});
  const SpectralEmbedding e = leading_eigenvectors(A, 2);
  CHECK(e.values(0) == doctest::Approx(1.0));
  CHECK(e.values(1) == doctest::Approx(-1.0));
  CHECK_FALSE(e.tie_warning);

  const SpectralEmbedding one = leading_eigenvectors(A, 1);
  CHECK(one.values(0) == doctest::Approx(1.0));
  CHECK(one.tie_warning);
}

TEST_CASE("noiseless input recovers the population eigenspace") {
  const ModelSpec spec = preset_planted_partition(120, 3, 0.4, 0.5, balanced_sizes(120, 3));
  const PopulationEigen pop = population_eigen(spec);
  const SpectralEmbedding e = leading_eigenvectors(build_probability_matrix(spec), 3);
  check_orthonormal(e.vectors, 1e-8);
  CHECK(procrustes_align(e.vectors, pop.U).frobenius_distance < 1e-8);
}

TEST_CASE("Rayleigh quotient of the embedding matches its eigenvalues") {
  const ModelSpec spec = preset_planted_partition(50, 2, 0.5, 0.5, balanced_sizes(50, 2));
  const AdjacencyMatrix A = sample_adjacency(spec, {1, 1});
  const SpectralEmbedding e = leading_eigenvectors(A, 2);
  const Matrix R = e.vectors.transpose() * A.dense() * e.vectors;
  CHECK((R - Matrix(e.values.asDiagonal())).norm() <= 1e-8);
  CHECK(std::abs(e.values(0)) >= std::abs(e.values(1)));
}

TEST_CASE("iterative and dense solvers agree") {
  Engine rng = make_engine({21});
  struct Case {
    int n, K;
    double alpha, lambda;
  };
  for (const Case c : {Case{400, 2, 0.05, 0.5}, Case{500, 3, 0.08, 0.4}, Case{300, 4, 0.3, 0.6}}) {
    const ModelSpec spec = preset_planted_partition(c.n, c.K, c.alpha, c.lambda, balanced_sizes(c.n, c.K));
    const AdjacencyMatrix A = sample_adjacency(spec, {static_cast<std::uint64_t>(c.n), 0});
    EigenConfig dense;
    dense.method = EigenMethod::dense;
    EigenConfig iter;
    iter.method = EigenMethod::iterative;
    const SpectralEmbedding ed = leading_eigenvectors(A, c.K, dense);
    const SpectralEmbedding ei = leading_eigenvectors(A, c.K, iter);
    CHECK(ed.method == EigenMethod::dense);
    CHECK(ei.method == EigenMethod::iterative);
    check_orthonormal(ed.vectors, 1e-8);
    check_orthonormal(ei.vectors, 1e-8);
    CHECK((ed.values - ei.values).cwiseAbs().maxCoeff() <= 1e-8 * std::abs(ed.values(0)));
    CHECK(procrustes_align(ei.vectors, ed.vectors).frobenius_distance <= 1e-6);
    CHECK(ei.residual <= 1e-8 * std::abs(ei.values(0)) * 1.0001);
  }
}

TEST_CASE("disassortative spectra are ordered by magnitude on the iterative path") {
  Matrix B(2, 2);
  B << 0.01, 0.1, 0.1, 0.01;
  const ModelSpec spec(MembershipMatrix::from_sizes(std::vector<int>{400, 400}), ConnectivityMatrix(B));
  const AdjacencyMatrix A = sample_adjacency(spec, {4, 4});
  EigenConfig iter;
  iter.method = EigenMethod::iterative;
  const SpectralEmbedding e = leading_eigenvectors(A, 2, iter);
  CHECK(e.values(0) > 0);
  CHECK(e.values(1) < 0);
  const Vector all = Eigen::SelfAdjointEigenSolver<Matrix>(A.dense(), Eigen::EigenvaluesOnly).eigenvalues();
  CHECK(e.values(0) == doctest::Approx(all.maxCoeff()).epsilon(1e-8));
  CHECK(e.values(1) == doctest::Approx(all.minCoeff()).epsilon(1e-8));
}

TEST_CASE("exhausted iteration budget raises a convergence error") {
  const ModelSpec spec = preset_planted_partition(1000, 2, 0.02, 0.5, balanced_sizes(1000, 2));
  const AdjacencyMatrix A = sample_adjacency(spec, {2, 2});
  EigenConfig cfg;
  cfg.method = EigenMethod::iterative;
  cfg.max_iterations = 1;
  cfg.tolerance = 1e-14;
  CHECK_THROWS_AS(leading_eigenvectors(A, 2, cfg), ConvergenceError);
}

TEST_CASE("spectral norm") {
  Matrix M = Matrix::Zero(3, 3);
  M.diagonal() << 3, -5, 1;
  CHECK(spectral_norm(M) == doctest::Approx(5.0));
  CHECK(spectral_norm(dense_operator(M)) == doctest::Approx(5.0));
  CHECK(spectral_norm(Matrix::Zero(4, 4)) == 0.0);
}

TEST_CASE("norm of A - P matches a dense oracle") {
  for (int n : {200, 500}) {
    const ModelSpec spec = preset_planted_partition(n, 2, 0.1, 0.5, balanced_sizes(n, 2));
    const PopulationEigen pop = population_eigen(spec);
    const AdjacencyMatrix A = sample_adjacency(spec, {8, static_cast<std::uint64_t>(n)});
    const double oracle = dense_spectral_norm(A.dense() - build_probability_matrix(spec));
    EigenConfig dense;
    dense.method = EigenMethod::dense;
    EigenConfig iter;
    iter.method = EigenMethod::iterative;
    CHECK(spectral_norm_difference(A, pop, dense) == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(spectral_norm_difference(A, pop, iter) == doctest::Approx(oracle).epsilon(1e-6));
  }
}

TEST_CASE("complete graph: A - P is minus the diagonal of P") {
  const ModelSpec spec(MembershipMatrix::from_sizes(std::vector<int>{60}), ConnectivityMatrix(Matrix::Ones(1, 1)));
  const AdjacencyMatrix A = sample_adjacency(spec, {1, 0});
  CHECK(spectral_norm_difference(A, population_eigen(spec)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("serial and parallel matvec agree exactly") {
  const ModelSpec spec = preset_planted_partition(700, 2, 0.05, 0.5, balanced_sizes(700, 2));
  const AdjacencyMatrix A = sample_adjacency(spec, {3, 3});
  Engine rng = make_engine({5});
  Matrix X(700, 3);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = draw_unit(rng) - 0.5;
  Matrix Y1(700, 3), Y2(700, 3);
  adjacency_multiply(A, X, Y1);
  adjacency_multiply_serial(A, X, Y2);
  CHECK(Y1 == Y2);
  CHECK((Y1 - A.dense() * X).norm() <= 1e-12 * X.norm() * 700);
}

TEST_CASE("Procrustes alignment") {
  Engine rng = make_engine({31});
  const ModelSpec spec = preset_planted_partition(90, 3, 0.5, 0.5, balanced_sizes(90, 3));
  const Matrix U = population_eigen(spec).U;

  SUBCASE("identity") {
    const AlignmentResult r = procrustes_align(U, U);
    CHECK((r.Q - Matrix::Identity(3, 3)).norm() <= 1e-10);
    CHECK(r.frobenius_distance <= 1e-10);
  }
  SUBCASE("exact rotation is recovered") {
    const Matrix Q0 = random_orthogonal(3, rng);
    const AlignmentResult r = procrustes_align(U * Q0, U);
    CHECK(r.frobenius_distance < 1e-10);
    CHECK((r.Q - Q0).norm() < 1e-10);
    CHECK((r.Q.transpose() * r.Q - Matrix::Identity(3, 3)).norm() < 1e-10);
  }
  SUBCASE("optimal against fixed and random rotations") {
    const AdjacencyMatrix A = sample_adjacency(spec, {6, 6});
    const Matrix Uhat = leading_eigenvectors(A, 3).vectors;
    const AlignmentResult r = procrustes_align(Uhat, U);
    CHECK(r.frobenius_distance <= (Uhat - U).norm() + 1e-12);
    for (int t = 0; t < 100; ++t) {
      const Matrix Q = random_orthogonal(3, rng);
      CHECK(r.frobenius_distance <= (Uhat - U * Q).norm() + 1e-12);
    }
  }
  SUBCASE("rank-deficient cross product is flagged") {
    Matrix a = Matrix::Zero(4, 2), b = Matrix::Zero(4, 2);
    a(0, 0) = a(1, 1) = 1.0;
    b(0, 0) = b(2, 1) = 1.0;
    const AlignmentResult r = procrustes_align(a, b);
    CHECK(r.rank_deficient);
    CHECK((r.Q.transpose() * r.Q - Matrix::Identity(2, 2)).norm() < 1e-10);
  }
}

TEST_CASE("Davis-Kahan check") {
  const ModelSpec spec = preset_planted_partition(60, 2, 0.5, 0.5, balanced_sizes(60, 2));
  const PopulationEigen pop = population_eigen(spec);
  const DavisKahanCheck exact = davis_kahan_gap_bound(pop.U, pop.U, pop.gamma, 0.0);
  CHECK(exact.holds);
  CHECK(exact.rhs == 0.0);

  const SpectralEmbedding noiseless = leading_eigenvectors(build_probability_matrix(spec), 2);
  CHECK(davis_kahan_gap_bound(noiseless.vectors, pop.U, pop.gamma, 0.0).holds);

  const AdjacencyMatrix A = sample_adjacency(spec, {1, 2});
  const double norm = spectral_norm_difference(A, pop);
  const DavisKahanCheck dk = davis_kahan_gap_bound(leading_eigenvectors(A, 2).vectors, pop.U, pop.gamma, norm);
  CHECK(dk.rhs == doctest::Approx(2.0 * std::sqrt(4.0) * norm / pop.gamma));
  CHECK(dk.holds == (dk.lhs <= dk.rhs + 1e-9));
  CHECK_THROWS_AS(davis_kahan_gap_bound(pop.U, pop.U, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("distance between normalized vectors") {
  Engine rng = make_engine({41});
  for (int t = 0; t < 100000; ++t) {
    const int dim = 1 + static_cast<int>(draw_index(rng, 6));
    Vector v1(dim), v2(dim);
    const double scale = std::pow(10.0, 4.0 * draw_unit(rng) - 2.0);
    for (int k = 0; k < dim; ++k) {
      v1(k) = draw_unit(rng) - 0.5;
      v2(k) = v1(k) + scale * (draw_unit(rng) - 0.5);
    }
    if (v1.norm() == 0.0 || v2.norm() == 0.0) continue;
    const double lhs = (v1 / v1.norm() - v2 / v2.norm()).norm();
    const double rhs = 2.0 * (v1 - v2).norm() / std::max(v1.norm(), v2.norm());
    CHECK(lhs <= rhs + 1e-12);
  }
}

TEST_CASE("embedding CSV has n rows and K columns") {
  Matrix V(3, 2);
  V << 0.1, 1.0 / 3.0, -2, 0, 1e-300, 5;
  std::ostringstream out;
  write_embedding_csv(out, V);
  std::istringstream in(out.str());
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 1);
    ++rows;
  }
  CHECK(rows == 3);
  CHECK(out.str().find("0.33333333333333331") != std::string::npos);
}
