#include "qkd/rng.hpp"

#include <stdexcept>

namespace qkd {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kStreamSalt = 0x5851F42D4C957F2Dull;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : state_(mix64(master_seed ^ mix64(stream_id ^ kStreamSalt))),
      master_seed_(master_seed),
      stream_id_(stream_id) {}

std::uint64_t RngStream::next_u64() {
  state_ += kGamma;
  return mix64(state_);
}

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint32_t RngStream::next_below(std::uint32_t bound) {
  if (bound == 0) {
    throw std::invalid_argument("next_below: bound must be >= 1");
  }
  std::uint32_t mask = bound - 1;
  mask |= mask >> 1;
  mask |= mask >> 2;
  mask |= mask >> 4;
  mask |= mask >> 8;
  mask |= mask >> 16;
  for (;;) {
    const auto v = static_cast<std::uint32_t>(next_u64()) & mask;
    if (v < bound) return v;
  }
}

}  // namespace qkd
