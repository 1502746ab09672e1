#pragma once

#include <cstdint>

namespace hazard {

// SplitMix64: a counter-based 64-bit generator (Steele, Lea, Flood 2014).
// The whole engine draws from per-replication instances of this stream; the
// AVX2 kernels run four of them side by side, so every constant and the
// uniform-double convention below are part of the reproducibility contract.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  std::uint64_t next_u64() {
    std::uint64_t z = (state += kGamma);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform on [0,1) from the top 52 bits: u = (x >> 12) * 2^-52.
  // Chosen (rather than the 53-bit variant) because a value < 2^52 converts
  // to double exactly via the 2^52 magic-number trick the SIMD lanes use.
  double next_double() {
    return static_cast<double>(next_u64() >> 12) * 0x1.0p-52;
  }
};

// One finalizer application; used to spread raw seed material.
inline std::uint64_t splitmix64_mix(std::uint64_t x) {
  SplitMix64 g(x);
  return g.next_u64();
}

// Per-replication stream seed: splitmix64(master_seed XOR replication_index).
inline std::uint64_t replication_seed(std::uint64_t master_seed, std::uint64_t replication) {
  return splitmix64_mix(master_seed ^ replication);
}

}  // namespace hazard
