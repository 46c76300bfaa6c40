#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ssbm {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Folds a sequence of words into one key. Order-sensitive.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> words) noexcept;

/// Top 53 bits of `bits` mapped to [0, 1).
constexpr double unit_interval(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Stateful engine for solver-internal randomness (seeding, restarts).
using Engine = std::mt19937_64;

inline Engine make_engine(std::initializer_list<std::uint64_t> words) {
  return Engine(derive_seed(words));
}

/// Uniform [0,1) draw from an engine without relying on library-specific
/// distribution implementations.
inline double draw_unit(Engine& engine) { return unit_interval(engine()); }

/// Uniform integer in [0, bound).
inline std::uint64_t draw_index(Engine& engine, std::uint64_t bound) {
  return static_cast<std::uint64_t>(draw_unit(engine) * static_cast<double>(bound)) % bound;
}

}  // namespace ssbm
