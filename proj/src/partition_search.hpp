#pragma once

// Exact minimum-cost partition of up to ~16 points into exactly K nonempty
// blocks, by dynamic programming over subsets. Shared by the exact k-means
// and k-median oracles.

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace ssbm::detail {

struct PartitionOptimum {
  double cost = std::numeric_limits<double>::infinity();
  std::vector<int> assignment;  ///< block index per point, blocks numbered by smallest member
};

inline PartitionOptimum best_partition(int n, int K, const std::function<double(std::uint32_t)>& block_cost) {
  const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1u);
  const std::size_t states = static_cast<std::size_t>(full) + 1;
  std::vector<double> cost(states, 0.0);
  for (std::uint32_t s = 1; s <= full; ++s) cost[s] = block_cost(s);

  constexpr double inf = std::numeric_limits<double>::infinity();
  // best[j][mask]: min cost of splitting mask into j nonempty blocks.
  std::vector<std::vector<double>> best(K + 1, std::vector<double>(states, inf));
  std::vector<std::vector<std::uint32_t>> choice(K + 1, std::vector<std::uint32_t>(states, 0));
  best[0][0] = 0.0;
  for (int j = 1; j <= K; ++j) {
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
      if (__builtin_popcount(mask) < j) continue;
      const std::uint32_t low = mask & (~mask + 1u);
      const std::uint32_t rest = mask ^ low;
      // Enumerate blocks s = low | sub for every sub of rest.
      std::uint32_t sub = rest;
      while (true) {
        const std::uint32_t s = low | sub;
        const double prev = best[j - 1][mask ^ s];
        if (prev < inf) {
          const double c = cost[s] + prev;
          if (c < best[j][mask]) {
            best[j][mask] = c;
            choice[j][mask] = s;
          }
        }
        if (sub == 0) break;
        sub = (sub - 1) & rest;
      }
    }
  }

  PartitionOptimum out;
  out.cost = best[K][full];
  out.assignment.assign(n, -1);
  std::vector<std::uint32_t> blocks;
  std::uint32_t mask = full;
  for (int j = K; j >= 1; --j) {
    const std::uint32_t s = choice[j][mask];
    blocks.push_back(s);
    mask ^= s;
  }
  // Each chosen block contains the lowest remaining point, so this order
  // already numbers blocks by their smallest member.
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (int i = 0; i < n; ++i)
      if (blocks[b] >> i & 1u) out.assignment[i] = static_cast<int>(b);
  return out;
}

}  // namespace ssbm::detail
