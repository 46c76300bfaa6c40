#pragma once

#include "ssbm/model.hpp"

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace ssbm {

struct Edge {
  int i = 0;
  int j = 0;
  auto operator<=>(const Edge&) const = default;
};

/// Reproducible stream key. Each adjacency entry is drawn from a hash of
/// (master_seed, replicate_index, i, j), so draws do not depend on order.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t replicate_index = 0;
  bool operator==(const SeedSpec&) const = default;
};

/// Symmetric, hollow, binary adjacency matrix backed by a sorted edge list
/// and a CSR neighbour index.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;
  /// `edges` must be sorted, unique, with 0 <= i < j < n.
  AdjacencyMatrix(int n, std::vector<Edge> edges);

  int n() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }

  int degree(int i) const { return offsets_[i + 1] - offsets_[i]; }
  std::span<const int> neighbors(int i) const {
    return {neighbors_.data() + offsets_[i], static_cast<std::size_t>(degree(i))};
  }
  /// a_ij; queries are symmetric and a_ii == 0.
  bool has_edge(int i, int j) const;

  /// Dense 0/1 matrix; refuses n above `max_dense_n`.
  Matrix dense(int max_dense_n = 4000) const;

  bool operator==(const AdjacencyMatrix& other) const {
    return n_ == other.n_ && edges_ == other.edges_;
  }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> offsets_{0};
  std::vector<int> neighbors_;
};

/// Uniform [0,1) variate attached to entry (i, j), i < j, of replicate `seed`.
double entry_uniform(SeedSpec seed, int i, int j) noexcept;

/// Upper-triangle entries independent Bernoulli(P_ij). Rows are processed in
/// parallel; the result is identical to `sample_adjacency_serial`.
AdjacencyMatrix sample_adjacency(const ModelSpec& spec, SeedSpec seed);

/// Single-threaded reference sampler.
AdjacencyMatrix sample_adjacency_serial(const ModelSpec& spec, SeedSpec seed);

struct DegreeSummary {
  double max_expected = 0.0;   ///< max_i sum_{j != i} P_ij
  double mean_expected = 0.0;
  double d = 0.0;              ///< n * alpha_n
  std::vector<double> expected;  ///< per-node expected degree
};

DegreeSummary expected_degree_summary(const ModelSpec& spec);

}  // namespace ssbm
