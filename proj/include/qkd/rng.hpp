#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace qkd {

// Seeded pseudo-random stream built on SplitMix64 (Steele/Lea/Flood mixing
// constants). Every draw is a pure function of (master_seed, stream_id, draw
// index): no platform-dependent library distributions are involved, so
// sequences are bit-for-bit reproducible across OSes and compilers.
//
// Stream splitting: the initial state is
//     mix64(master_seed ^ mix64(stream_id ^ 0x5851F42D4C957F2D)).
// mix64 is a bijection, so for a fixed master seed distinct stream ids start
// from distinct states. Two streams could still land on overlapping segments
// of the shared +gamma orbit; for s streams of d draws each that happens with
// probability about s*d / 2^64. Statistical quality is fine for simulation;
// this is not a cryptographic generator.
class RngStream {
public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();

  // Uniform in [0, 1), 53-bit resolution.
  double next_double();

  // Uniform in [0, bound), bound >= 1. Unbiased via masked rejection; always
  // consumes at least one draw (power-of-two bounds consume exactly one).
  std::uint32_t next_below(std::uint32_t bound);

  // In-place Fisher-Yates shuffle; same result on every platform.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = next_below(static_cast<std::uint32_t>(i));
      std::swap(v[i - 1], v[j]);
    }
  }

private:
  std::uint64_t state_;
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
};

}  // namespace qkd
