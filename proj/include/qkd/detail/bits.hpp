#pragma once

#include <bit>
#include <cstdint>

namespace qkd::detail {

inline bool is_pow2(int x) {
  return x > 0 && std::has_single_bit(static_cast<std::uint32_t>(x));
}

// floor(log2 x), x >= 1
inline int floor_log2(int x) {
  return std::bit_width(static_cast<std::uint32_t>(x)) - 1;
}

// ceil(log2 x), x >= 1
inline int ceil_log2(int x) {
  return x <= 1 ? 0 : std::bit_width(static_cast<std::uint32_t>(x - 1));
}

}  // namespace qkd::detail
