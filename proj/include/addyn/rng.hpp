#pragma once

#include <cstdint>
#include <random>

namespace addyn {

using Rng = std::mt19937_64;

/// Independent stream for replicate `replicate` of a run seeded with `master`.
inline Rng make_stream(std::uint64_t master, std::uint64_t replicate = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(master),
                    static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(replicate),
                    static_cast<std::uint32_t>(replicate >> 32), 0x5eedu};
  return Rng(seq);
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double exponential(Rng& rng, double rate) {
  return std::exponential_distribution<double>(rate)(rng);
}

}  // namespace addyn
