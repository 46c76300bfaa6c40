#include "ssbm/rng.hpp"

namespace ssbm {

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> words) noexcept {
  std::uint64_t key = 0x6a09e667f3bcc908ULL;
  for (std::uint64_t w : words) key = mix64(key ^ mix64(w + 0x243f6a8885a308d3ULL));
  return key;
}

}  // namespace ssbm
