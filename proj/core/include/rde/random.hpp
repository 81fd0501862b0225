#pragma once

#include <cstdint>
#include <limits>

namespace rde {

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator, so it plugs
/// into <random> distributions. Streams are keyed by (seed, index) so that
/// sample j is the same regardless of which thread draws it.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Seed of the independent stream number `index` under `seed`.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 mix(seed ^ (0xd1b54a32d192ed03ULL * (index + 1)));
  mix();
  return mix();
}

inline SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(stream_seed(seed, index));
}

}  // namespace rde
