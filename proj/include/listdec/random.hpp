#pragma once

/**
 * Reproducible random streams.
 *
 * A RandomSource is a value (seed, stream_id). Every consumer of randomness
 * constructs its own StreamEngine from a source, so results never depend on
 * the order in which trials or queries are evaluated.
 *
 * The engine is xoshiro256** seeded through splitmix64. Both are pure integer
 * arithmetic, so the raw 64-bit output is identical on every platform.
 *
 * Stream derivation (stable format, do not change without bumping
 * kStreamDerivationVersion):
 *   id = kPathInit
 *   for each index i in the path:  id = mix64(id + kGolden) ^ i ; id = mix64(id)
 * For a fixed prefix the map from the last index to id is a bijection, so
 * sibling streams never collide.
 */

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>

namespace listdec {

inline constexpr int kStreamDerivationVersion = 1;

/// splitmix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
inline constexpr std::uint64_t kPathInit = 0x6a09e667f3bcc908ULL;

/// Extends a 64-bit path key by one index.
constexpr std::uint64_t extend_key(std::uint64_t key, std::uint64_t index) noexcept {
  return mix64(mix64(key + kGolden) ^ index);
}

struct RandomSource {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  friend constexpr bool operator==(const RandomSource&, const RandomSource&) = default;
};

constexpr std::uint64_t path_key(std::span<const std::uint64_t> indices) noexcept {
  std::uint64_t id = kPathInit;
  for (auto i : indices) id = extend_key(id, i);
  return id;
}

/// Maps (seed, index path) to a stream identity. Stable across versions.
constexpr RandomSource derive_stream(std::uint64_t seed,
                                     std::span<const std::uint64_t> indices) noexcept {
  return RandomSource{seed, path_key(indices)};
}

constexpr RandomSource derive_stream(std::uint64_t seed,
                                     std::initializer_list<std::uint64_t> indices) noexcept {
  return derive_stream(seed, std::span<const std::uint64_t>(indices.begin(), indices.size()));
}

/// A child seed, for harness levels that hand a plain seed to the next level.
constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                    std::initializer_list<std::uint64_t> indices) noexcept {
  return mix64(seed ^ derive_stream(seed, indices).stream_id);
}

/// xoshiro256** over a state expanded from (seed, stream_id).
class StreamEngine {
 public:
  using result_type = std::uint64_t;

  explicit constexpr StreamEngine(RandomSource src) noexcept {
    std::uint64_t x = mix64(src.seed + kGolden) ^ mix64(src.stream_id ^ 0xd1b54a32d192ed03ULL);
    x ^= src.stream_id;
    for (auto& w : s_) {
      x += kGolden;
      w = mix64(x);
    }
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = kGolden;
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~std::uint64_t{0}; }

  constexpr result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  constexpr double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1].
  constexpr double uniform_open0() noexcept { return 1.0 - uniform(); }

  /// Uniform integer in [0, n) by Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t n) noexcept {
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
};

}  // namespace listdec
