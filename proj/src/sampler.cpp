#include "ssbm/sampler.hpp"

#include "ssbm/rng.hpp"

#include <algorithm>
#include <stdexcept>

namespace ssbm {

AdjacencyMatrix::AdjacencyMatrix(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n < 0) throw std::invalid_argument("adjacency: negative n");
  std::vector<int> deg(n, 0);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge& ed = edges_[e];
    if (ed.i < 0 || ed.j >= n || ed.i >= ed.j)
      throw std::invalid_argument("adjacency: edges need 0 <= i < j < n");
    if (e > 0 && !(edges_[e - 1] < ed))
      throw std::invalid_argument("adjacency: edge list must be sorted and unique");
    ++deg[ed.i];
    ++deg[ed.j];
  }
  offsets_.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + deg[i];
  neighbors_.resize(offsets_[n]);
  std::vector<int> cursor(offsets_.begin(), offsets_.end() - 1);
  // Lexicographic edge order makes every neighbour list ascending.
  for (const Edge& ed : edges_) neighbors_[cursor[ed.j]++] = ed.i;
  for (const Edge& ed : edges_) neighbors_[cursor[ed.i]++] = ed.j;
  for (int i = 0; i < n; ++i)
    std::sort(neighbors_.begin() + offsets_[i], neighbors_.begin() + offsets_[i + 1]);
}

bool AdjacencyMatrix::has_edge(int i, int j) const {
  if (i == j) return false;
  auto nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

Matrix AdjacencyMatrix::dense(int max_dense_n) const {
  if (n_ > max_dense_n) throw std::length_error("adjacency: too large for a dense view");
  Matrix A = Matrix::Zero(n_, n_);
  for (const Edge& e : edges_) {
    A(e.i, e.j) = 1.0;
    A(e.j, e.i) = 1.0;
  }
  return A;
}

double entry_uniform(SeedSpec seed, int i, int j) noexcept {
  const std::uint64_t stream = derive_seed({seed.master_seed, seed.replicate_index});
  const std::uint64_t row = mix64(stream ^ (static_cast<std::uint64_t>(i) * 0xd1b54a32d192ed03ULL));
  return unit_interval(mix64(row ^ (static_cast<std::uint64_t>(j) * 0xaef17502108ef2d9ULL)));
}

namespace {

// Upper-triangle neighbours j > i of row i.
void sample_row(const ModelSpec& spec, SeedSpec seed, int i, std::vector<int>& out) {
  out.clear();
  for (int j = i + 1; j < spec.n(); ++j) {
    const double p = spec.probability(i, j);
    if (p <= 0.0) continue;
    if (p >= 1.0 || entry_uniform(seed, i, j) < p) out.push_back(j);
  }
}

AdjacencyMatrix assemble(int n, const std::vector<std::vector<int>>& rows) {
  std::size_t m = 0;
  for (const auto& r : rows) m += r.size();
  std::vector<Edge> edges;
  edges.reserve(m);
  for (int i = 0; i < n; ++i)
    for (int j : rows[i]) edges.push_back({i, j});
  return AdjacencyMatrix(n, std::move(edges));
}

}  // namespace

AdjacencyMatrix sample_adjacency(const ModelSpec& spec, SeedSpec seed) {
  const int n = spec.n();
  std::vector<std::vector<int>> rows(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (int i = 0; i < n; ++i) sample_row(spec, seed, i, rows[i]);
  return assemble(n, rows);
}

AdjacencyMatrix sample_adjacency_serial(const ModelSpec& spec, SeedSpec seed) {
  const int n = spec.n();
  std::vector<std::vector<int>> rows(n);
  for (int i = 0; i < n; ++i) sample_row(spec, seed, i, rows[i]);
  return assemble(n, rows);
}

DegreeSummary expected_degree_summary(const ModelSpec& spec) {
  const auto& theta = spec.membership();
  const int K = spec.K();
  std::vector<double> psi_sum(K, 0.0);
  for (int i = 0; i < spec.n(); ++i) psi_sum[theta[i]] += spec.psi(i);

  DegreeSummary s;
  s.d = spec.d();
  s.expected.resize(spec.n());
  double total = 0.0;
  for (int i = 0; i < spec.n(); ++i) {
    double row = 0.0;
    for (int k = 0; k < K; ++k) row += spec.connectivity()(theta[i], k) * psi_sum[k];
    row = spec.psi(i) * row - spec.probability(i, i);
    s.expected[i] = row;
    s.max_expected = std::max(s.max_expected, row);
    total += row;
  }
  s.mean_expected = spec.n() > 0 ? total / spec.n() : 0.0;
  return s;
}

}  // namespace ssbm
