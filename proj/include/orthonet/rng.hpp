#ifndef ORTHONET_RNG_HPP
#define ORTHONET_RNG_HPP

#include <cstdint>

namespace orthonet {

/// Counter-based pseudo-random generator (SplitMix64 finalizer over a keyed
/// counter). Output depends only on (seed, stream, counter), so sequences are
/// reproducible across platforms and independent streams can be split off a
/// single seed.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed + mix(stream + kGamma))) {}

  /// Derive an independent generator from the same seed.
  CounterRng split(std::uint64_t stream) const {
    CounterRng r(0);
    r.key_ = mix(key_ + mix(stream + kGamma));
    r.counter_ = 0;
    return r;
  }

  /// Random word at an explicit counter position; does not advance state.
  std::uint64_t at(std::uint64_t counter) const {
    return mix(key_ + (counter + 1) * kGamma);
  }

  /// Uniform double in [0, 1) at an explicit counter position.
  double double_at(std::uint64_t counter) const { return to_unit(at(counter)); }

  std::uint64_t next_u64() { return at(counter_++); }

  /// Uniform double in [0, 1).
  double next_double() { return to_unit(next_u64()); }

  /// Uniform integer in [0, n), n > 0. Multiply-shift reduction.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<__uint128_t>(next_u64()) * n) >> 64);
  }

  static double to_unit(std::uint64_t word) {
    return static_cast<double>(word >> 11) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// FNV-1a over a byte string. Used to derive per-object RNG streams from
/// stable string ids (std::hash is not stable across implementations).
inline std::uint64_t fnv1a64(const char* data, std::size_t n) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace orthonet

#endif  // ORTHONET_RNG_HPP
