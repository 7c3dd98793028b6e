#pragma once

// Counter-based random numbers. Every draw is a pure function of
// (seed, stream tag, counter), so replications, point indices and vertex
// pairs can be addressed directly without sharing generator state.

#include <array>
#include <cstdint>
#include <limits>

namespace rbg {

/// Philox4x32-10 block function (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter apply(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      ctr = single_round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr Counter single_round(const Counter& c, const Key& k) noexcept {
    const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// Stream tags keep unrelated consumers of one seed apart.
enum class StreamTag : std::uint32_t {
  derive = 1,
  count = 2,
  agent_points = 3,
  hub_points = 4,
  marks_agent = 5,
  marks_hub = 6,
  bipartite_edge = 7,
  unipartite_edge = 8,
  bootstrap = 9,
  generic = 10,
};

inline constexpr Philox4x32::Key key_from_seed(std::uint64_t seed) noexcept {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

inline constexpr std::uint64_t join64(std::uint32_t hi, std::uint32_t lo) noexcept {
  return (std::uint64_t{hi} << 32) | lo;
}

/// 53-bit uniform in [0, 1).
inline constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Two 64-bit words for (seed, tag, a, b).
inline constexpr std::array<std::uint64_t, 2> random_words(std::uint64_t seed, StreamTag tag,
                                                           std::uint64_t a,
                                                           std::uint32_t b) noexcept {
  // The counter has 128 bits: 64 for a, 32 for b, 32 for the tag.
  const auto out = Philox4x32::apply(
      {static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32), b,
       static_cast<std::uint32_t>(tag)},
      key_from_seed(seed));
  return {join64(out[0], out[1]), join64(out[2], out[3])};
}

/// Child seed for a sub-experiment; used for experiment -> grid point -> replication.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                           std::uint32_t b = 0) noexcept {
  return random_words(seed, StreamTag::derive, a, b)[0];
}

/// Uniform keyed by an unordered vertex pair. `first` indexes the agent (or the
/// smaller unipartite index), `second` the hub (or the larger index).
inline constexpr double pair_uniform(std::uint64_t seed, StreamTag tag, std::uint32_t first,
                                     std::uint32_t second) noexcept {
  return to_unit(random_words(seed, tag, first, second)[0]);
}

/// Sequential engine over a single counter stream; satisfies
/// UniformRandomBitGenerator so it can drive <random> distributions.
class CounterEngine {
 public:
  using result_type = std::uint64_t;

  CounterEngine(std::uint64_t seed, StreamTag tag, std::uint32_t stream = 0) noexcept
      : seed_(seed), tag_(tag), stream_(stream) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const auto words = random_words(seed_, tag_, counter_++, stream_);
    spare_ = words[1];
    have_spare_ = true;
    return words[0];
  }

  double uniform() noexcept { return to_unit((*this)()); }

 private:
  std::uint64_t seed_;
  StreamTag tag_;
  std::uint32_t stream_;
  std::uint64_t counter_ = 0;
  std::uint64_t spare_ = 0;
  bool have_spare_ = false;
};

}  // namespace rbg
