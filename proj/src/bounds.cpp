#include "ssbm/bounds.hpp"

#include "ssbm/rng.hpp"
#include "ssbm/sampler.hpp"
#include "ssbm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>

namespace ssbm {

double c_sbm(double C) { return 1.0 / (64.0 * C * C); }
double c_dcbm(double C) { return 1.0 / (8.0 * C); }

BoundInputs model_bound_inputs(const ModelSpec& spec, const PopulationEigen& pop, double epsilon, double C,
                               std::optional<double> lambda) {
  BoundInputs in;
  const auto& theta = spec.membership();
  in.n = spec.n();
  in.K = spec.K();
  in.rank = pop.rank;
  in.alpha = spec.alpha();
  in.gamma = pop.gamma;
  if (lambda)
    in.lambda = *lambda;
  else if (spec.preset() && spec.preset()->lambda)
    in.lambda = *spec.preset()->lambda;
  in.epsilon = epsilon;
  in.n_min = theta.n_min();
  in.n_max = theta.n_max();
  in.n_max_second = theta.n_max_second();
  in.d = spec.d();
  in.sizes = theta.sizes();
  const HeterogeneityStats stats = heterogeneity_stats(spec);
  in.nu = stats.nu;
  in.n_tilde_min = stats.n_tilde_min;
  in.weighted_heterogeneity = stats.weighted_heterogeneity(theta);
  in.C = C;
  return in;
}

namespace {

enum class Family { sbm, dcbm, none };

double resolve_c(const BoundInputs& in, Family family) {
  if (std::isfinite(in.c_override)) return in.c_override;
  if (!(in.C > 0.0)) throw std::invalid_argument("bounds: constant C (or an explicit c) is required");
  return family == Family::sbm ? c_sbm(in.C) : c_dcbm(in.C);
}

void require_rank(const BoundInputs& in) {
  if (in.rank < in.K) throw std::invalid_argument("bounds: population matrix has rank < K");
  if (!(in.gamma > 0.0)) throw std::invalid_argument("bounds: gamma must be positive");
}

void require_lambda(const BoundInputs& in) {
  if (!(in.lambda > 0.0)) throw std::invalid_argument("bounds: lambda must be positive");
}

void require_heterogeneity(const BoundInputs& in) {
  if (!std::isfinite(in.weighted_heterogeneity) || in.weighted_heterogeneity <= 0.0)
    throw std::invalid_argument("bounds: heterogeneity measure is undefined");
  for (double v : in.nu)
    if (!std::isfinite(v)) throw std::invalid_argument("bounds: nu_k is not finite");
}

double sbm_ratio(const BoundInputs& in) {
  return (2.0 + in.epsilon) * in.K * in.n * in.alpha / (in.gamma * in.gamma);
}

double sbm_corollary_ratio(const BoundInputs& in, double size) {
  return (2.0 + in.epsilon) * in.K * size / (static_cast<double>(in.n_min) * in.n_min * in.lambda * in.lambda * in.alpha);
}

double max_nu(const BoundInputs& in) { return *std::max_element(in.nu.begin(), in.nu.end()); }

BoundReport finish(std::string name, double lhs, double rhs, double c, const BoundInputs& in) {
  BoundReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.holds = lhs <= rhs + kBoundSlack;
  r.near_boundary = std::abs(lhs - rhs) <= kNearBoundaryFraction * std::abs(rhs);
  r.c_used = c;
  r.inputs = in;
  return r;
}

}  // namespace

BoundReport evaluate_bound(const std::string& name, const BoundInputs& in) {
  constexpr double nan = BoundInputs::nan;
  if (name == "sbm_condition") {
    require_rank(in);
    const double c = resolve_c(in, Family::sbm);
    return finish(name, sbm_ratio(in), c, c, in);
  }
  if (name == "sbm_bound") {
    require_rank(in);
    const double c = resolve_c(in, Family::sbm);
    return finish(name, in.observed, sbm_ratio(in) / c, c, in);
  }
  if (name == "sbm_corollary_condition") {
    require_rank(in);
    require_lambda(in);
    const double c = resolve_c(in, Family::sbm);
    return finish(name, sbm_corollary_ratio(in, in.n), c, c, in);
  }
  if (name == "sbm_corollary_L_tilde") {
    require_rank(in);
    require_lambda(in);
    const double c = resolve_c(in, Family::sbm);
    return finish(name, in.observed, sbm_corollary_ratio(in, in.n) / c, c, in);
  }
  if (name == "sbm_corollary_L") {
    require_rank(in);
    require_lambda(in);
    const double c = resolve_c(in, Family::sbm);
    return finish(name, in.observed, sbm_corollary_ratio(in, in.n_max_second) / c, c, in);
  }
  if (name == "dcbm_condition") {
    require_rank(in);
    require_heterogeneity(in);
    const double c = resolve_c(in, Family::dcbm);
    const double lhs = (2.5 + in.epsilon) * std::sqrt(in.K * in.n * in.alpha) / in.gamma;
    return finish(name, lhs, c * in.n_min / std::sqrt(in.weighted_heterogeneity), c, in);
  }
  if (name == "dcbm_bound") {
    require_rank(in);
    require_heterogeneity(in);
    const double c = resolve_c(in, Family::dcbm);
    const double rhs = (2.5 + in.epsilon) * std::sqrt(in.weighted_heterogeneity) * std::sqrt(in.K * in.alpha) /
                       (in.gamma * std::sqrt(static_cast<double>(in.n))) / c;
    return finish(name, in.observed, rhs, c, in);
  }
  if (name == "dcbm_corollary_condition") {
    require_rank(in);
    require_lambda(in);
    require_heterogeneity(in);
    const double c = resolve_c(in, Family::dcbm);
    const double lhs =
        (2.5 + in.epsilon) * std::sqrt(static_cast<double>(in.K) * in.n) / (in.n_tilde_min * in.lambda * std::sqrt(in.alpha));
    return finish(name, lhs, c * in.n_min / std::sqrt(in.weighted_heterogeneity), c, in);
  }
  if (name == "dcbm_corollary_bound") {
    require_rank(in);
    require_lambda(in);
    require_heterogeneity(in);
    const double c = resolve_c(in, Family::dcbm);
    const double rhs = (2.5 + in.epsilon) * std::sqrt(static_cast<double>(in.K)) /
                       (in.n_tilde_min * in.lambda * std::sqrt(in.n * in.alpha)) * std::sqrt(in.weighted_heterogeneity) / c;
    return finish(name, in.observed, rhs, c, in);
  }
  if (name == "dcbm_rate_reference") {
    // Unit-free rate n sqrt(nu) / (n~_min lambda sqrt(n alpha)), nu = max_k nu_k.
    require_lambda(in);
    require_heterogeneity(in);
    const double rhs = in.n * std::sqrt(max_nu(in)) / (in.n_tilde_min * in.lambda * std::sqrt(in.n * in.alpha));
    return finish(name, in.observed, rhs, nan, in);
  }
  if (name == "lemma_hamming") {
    const double F = in.frobenius_distance;
    return finish(name, in.observed, 4.0 * (4.0 + 2.0 * in.epsilon) * F * F, nan, in);
  }
  if (name == "lemma_hamming_recovery") {
    if (in.deltas.size() != in.sizes.size() || in.sizes.empty())
      throw std::invalid_argument("bounds: recovery clause needs deltas and sizes");
    const double F = in.frobenius_distance;
    double worst = 0.0;
    for (std::size_t k = 0; k < in.sizes.size(); ++k)
      worst = std::max(worst, (16.0 + 8.0 * in.epsilon) * F * F / (in.deltas[k] * in.deltas[k] * in.sizes[k]));
    return finish(name, worst, 1.0, nan, in);
  }
  if (name == "lemma_zero_rows") {
    require_heterogeneity(in);
    return finish(name, in.observed, std::sqrt(in.weighted_heterogeneity) * in.frobenius_distance, nan, in);
  }
  if (name == "dcbm_exception_count") {
    require_heterogeneity(in);
    if (!(in.C > 0.0)) throw std::invalid_argument("bounds: constant C is required");
    if (!(in.gamma > 0.0)) throw std::invalid_argument("bounds: gamma must be positive");
    const double rhs = (2.5 + in.epsilon) * 8.0 * in.C * std::sqrt(in.K * in.n * in.alpha) / in.gamma *
                       std::sqrt(in.weighted_heterogeneity);
    return finish(name, in.observed, rhs, nan, in);
  }
  throw std::invalid_argument("bounds: unknown statement '" + name + "'");
}

BoundReport reevaluate(const BoundReport& report) { return evaluate_bound(report.name, report.inputs); }

BoundPair sbm_condition_and_bound(const BoundInputs& inputs) {
  return {evaluate_bound("sbm_condition", inputs), evaluate_bound("sbm_bound", inputs)};
}

CorollaryBounds sbm_corollary_bounds(const BoundInputs& inputs, double observed_L_tilde, double observed_L) {
  BoundInputs lt = inputs;
  lt.observed = observed_L_tilde;
  BoundInputs l = inputs;
  l.observed = observed_L;
  return {evaluate_bound("sbm_corollary_condition", inputs), evaluate_bound("sbm_corollary_L_tilde", lt),
          evaluate_bound("sbm_corollary_L", l)};
}

BoundPair dcbm_condition_and_bound(const BoundInputs& inputs) {
  return {evaluate_bound("dcbm_condition", inputs), evaluate_bound("dcbm_bound", inputs)};
}

BoundPair dcbm_corollary_bounds(const BoundInputs& inputs) {
  return {evaluate_bound("dcbm_corollary_condition", inputs), evaluate_bound("dcbm_corollary_bound", inputs)};
}

double mcsherry_reference(const BoundInputs& in) {
  const double sigma2 = in.alpha * (1.0 - in.alpha);
  if (!(sigma2 > 0.0) || !(in.lambda > 0.0)) return BoundInputs::nan;
  return in.lambda * in.lambda * in.alpha * in.alpha * in.n / (sigma2 * std::log(static_cast<double>(in.n)));
}

HammingCheck lemma_hamming_check(const Matrix& Uhat, const Matrix& U, const ClusteringResult& result,
                                 const MembershipMatrix& truth, double epsilon, bool epsilon_certified,
                                 std::optional<std::vector<double>> deltas) {
  const AlignmentResult align = procrustes_align(Uhat, U);
  const Matrix Ua = U * align.Q;
  Matrix Ubar(Uhat.rows(), Uhat.cols());
  for (Eigen::Index i = 0; i < Uhat.rows(); ++i) Ubar.row(i) = result.centers.row(result.membership[i]);
  const std::vector<double> delta = deltas ? std::move(*deltas) : default_deltas(truth);

  HammingCheck out;
  out.sets = exception_sets(Ubar, Ua, truth, delta);
  out.epsilon_certified = epsilon_certified;

  BoundInputs in;
  in.n = truth.n();
  in.K = truth.K();
  in.epsilon = epsilon;
  in.n_min = truth.n_min();
  in.n_max = truth.n_max();
  in.n_max_second = truth.n_max_second();
  in.sizes = truth.sizes();
  in.deltas = delta;
  in.frobenius_distance = align.frobenius_distance;
  in.observed = out.sets.weighted_count;
  out.inequality = evaluate_bound("lemma_hamming", in);
  out.recovery = evaluate_bound("lemma_hamming_recovery", in);
  if (out.recovery.holds) {
    out.agreement_checked = true;
    out.agreement = labels_agree_on(result.membership, truth, out.sets.correct_nodes);
  }
  return out;
}

BoundReport lemma_zero_rows_check(const Matrix& Uhat, const Matrix& U, const MembershipMatrix& truth,
                                  const HeterogeneityStats& stats) {
  int zero_rows = 0;
  for (Eigen::Index i = 0; i < Uhat.rows(); ++i) zero_rows += Uhat.row(i).norm() <= kZeroRowThreshold;
  BoundInputs in;
  in.n = truth.n();
  in.K = truth.K();
  in.n_min = truth.n_min();
  in.sizes = truth.sizes();
  in.nu = stats.nu;
  in.n_tilde_min = stats.n_tilde_min;
  in.weighted_heterogeneity = stats.weighted_heterogeneity(truth);
  in.frobenius_distance = procrustes_align(Uhat, U).frobenius_distance;
  in.observed = zero_rows;
  return evaluate_bound("lemma_zero_rows", in);
}

DcbmProofSets dcbm_proof_sets(const SphericalResult& result, const Matrix& Ualigned, const BoundInputs& inputs) {
  DcbmProofSets out;
  const double threshold = 1.0 / std::sqrt(2.0);
  const ClusteringResult& cl = result.clustering;
  for (int i : result.positive_rows) {
    const double norm = Ualigned.row(i).norm();
    const Eigen::RowVectorXd target = Ualigned.row(i) / norm;
    if ((cl.centers.row(cl.membership[i]) - target).norm() >= threshold) out.S.push_back(i);
  }
  out.I0 = result.zero_rows;
  BoundInputs in = inputs;
  in.observed = static_cast<double>(out.S.size() + out.I0.size());
  out.report = evaluate_bound("dcbm_exception_count", in);
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double h = (values.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - lo) * (values[hi] - values[lo]);
}

ConcentrationStudy spectral_concentration_study(const std::vector<ConcentrationCell>& cells, int replicates,
                                                std::uint64_t master_seed, const EigenConfig& cfg) {
  if (replicates < 1) throw std::invalid_argument("concentration study: replicates must be >= 1");
  const int ncells = static_cast<int>(cells.size());
  std::vector<ModelSpec> specs;
  std::vector<PopulationEigen> pops;
  std::vector<double> degree(ncells);
  for (int c = 0; c < ncells; ++c) {
    const ConcentrationCell& cell = cells[c];
    if (cell.n < 2) throw std::invalid_argument("concentration study: n must be >= 2");
    const double floor_d = cell.c0 * std::log(static_cast<double>(cell.n));
    degree[c] = cell.d.value_or(floor_d);
    if (degree[c] < floor_d * (1.0 - 1e-12)) throw std::invalid_argument("concentration study: d < c0 log n");
    const double p = degree[c] / cell.n;
    if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("concentration study: d / n must lie in (0, 1]");
    const std::vector<int> sizes{cell.n};
    specs.emplace_back(MembershipMatrix::from_sizes(sizes), ConnectivityMatrix(Matrix::Constant(1, 1, p)));
    pops.push_back(population_eigen(specs.back()));
  }

  const int tasks = ncells * replicates;
  std::vector<double> norms(tasks, 0.0);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < tasks; ++t) {
    const int c = t / replicates;
    const int r = t % replicates;
    try {
      const SeedSpec seed{derive_seed({master_seed, static_cast<std::uint64_t>(c)}), static_cast<std::uint64_t>(r)};
      const AdjacencyMatrix A = sample_adjacency(specs[c], seed);
      norms[t] = spectral_norm_difference(A, pops[c], cfg);
    } catch (...) {
#pragma omp critical(concentration_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  ConcentrationStudy study;
  for (int c = 0; c < ncells; ++c) {
    CellSummary s;
    s.n = cells[c].n;
    s.c0 = cells[c].c0;
    s.d = degree[c];
    s.replicates = replicates;
    std::vector<double> log_ratios;
    for (int r = 0; r < replicates; ++r) {
      const double v = norms[c * replicates + r];
      s.ratios.push_back(v / std::sqrt(s.d));
      log_ratios.push_back(v / std::sqrt(s.d * std::log(static_cast<double>(s.n))));
    }
    s.max_ratio = *std::max_element(s.ratios.begin(), s.ratios.end());
    double sum = 0.0;
    for (double v : s.ratios) sum += v;
    s.mean_ratio = sum / replicates;
    s.q50 = quantile(s.ratios, 0.5);
    s.q90 = quantile(s.ratios, 0.9);
    s.q99 = quantile(s.ratios, 0.99);
    s.max_log_ratio = *std::max_element(log_ratios.begin(), log_ratios.end());
    s.median_log_ratio = quantile(log_ratios, 0.5);
    study.C_empirical = std::max(study.C_empirical, s.max_ratio);
    study.cells.push_back(std::move(s));
  }
  return study;
}

}  // namespace ssbm
