#pragma once
// Deterministic counter-mode random streams built on the SplitMix64 finalizer.
//
// Invariants:
//   - stream_value(key, k) equals output k of the reference SplitMix64 engine
//     seeded with `key` (outputs numbered from 0).
//   - site draws depend only on (seed, site), never on enumeration order, so a
//     disorder realization restricted to any site set is reproducible.

#include <cstdint>

namespace mpal::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

inline constexpr std::uint64_t stream_value(std::uint64_t key, std::uint64_t counter) {
  return mix64(key + (counter + 1) * kGolden);
}

// Seed for trial i of an experiment with the given base seed.
inline constexpr std::uint64_t split(std::uint64_t base, std::uint64_t trial) {
  return stream_value(base, trial);
}

// Bijection Z -> N on 64-bit words: 0,-1,1,-2,2,... -> 0,1,2,3,4,...
inline constexpr std::uint64_t zigzag(std::int64_t u) {
  return (static_cast<std::uint64_t>(u) << 1) ^ static_cast<std::uint64_t>(u >> 63);
}

inline constexpr std::uint64_t site_raw(std::uint64_t seed, std::int64_t site) {
  return stream_value(seed, zigzag(site));
}

// 53-bit mantissa in [0, 1).
inline constexpr double unit_double(std::uint64_t raw) {
  return static_cast<double>(raw >> 11) * 0x1.0p-53;
}

inline constexpr double site_unit(std::uint64_t seed, std::int64_t site) {
  return unit_double(site_raw(seed, site));
}

}  // namespace mpal::rng
