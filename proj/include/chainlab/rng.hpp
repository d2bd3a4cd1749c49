#pragma once

#include <cstdint>
#include <random>

namespace chainlab {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; decorrelates nearby seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Generator for replicate block `block` of a stream identified by `seed`.
/// Streams depend only on (seed, block), never on the worker that runs them.
Rng block_rng(std::uint64_t seed, std::uint64_t block);

/// Number of samples per replicate block in every Monte Carlo kernel.
inline constexpr int kSamplesPerBlock = 256;

}  // namespace chainlab
