#pragma once

#include <cstdint>
#include <random>

namespace bagvar {

using Engine = std::mt19937_64;

/// Independent sub-streams derived from one user seed. Each purpose gets its
/// own domain so that, e.g., resampling and split noise never share draws.
enum class StreamDomain : std::uint64_t {
  resample = 1,
  split_noise = 2,
  generator = 3,
  study = 4,
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed of stream `index` in `domain` under `seed`. Pure function, so
/// replicates can be produced in any order.
std::uint64_t derive_seed(std::uint64_t seed, StreamDomain domain, std::uint64_t index) noexcept;

inline Engine make_engine(std::uint64_t seed, StreamDomain domain, std::uint64_t index) {
  return Engine(derive_seed(seed, domain, index));
}

}  // namespace bagvar
