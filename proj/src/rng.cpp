#include "chainlab/rng.hpp"

namespace chainlab {

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Rng block_rng(std::uint64_t seed, std::uint64_t block) {
  return Rng(mix_seed(mix_seed(seed) ^ block));
}

}  // namespace chainlab
