#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace qkd {

// The four raw-key encoding schemes. Enum values double as wire tags.
enum class Scheme : std::uint8_t {
  SimpleBinning = 0,       // fixed bin size k, no public channel
  AdaptiveBinning = 1,     // per-frame minimal bin size, no public channel
  AdaptiveAggregated = 2,  // randomized single marked bin, public channel
  AdaptiveFraming = 3,     // one subframe per marked unit, public channel
};

constexpr const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::SimpleBinning: return "sb";
    case Scheme::AdaptiveBinning: return "ab";
    case Scheme::AdaptiveAggregated: return "aab";
    case Scheme::AdaptiveFraming: return "af";
  }
  return "?";
}

constexpr std::optional<Scheme> parse_scheme(std::string_view name) {
  if (name == "sb") return Scheme::SimpleBinning;
  if (name == "ab") return Scheme::AdaptiveBinning;
  if (name == "aab") return Scheme::AdaptiveAggregated;
  if (name == "af") return Scheme::AdaptiveFraming;
  return std::nullopt;
}

// AAB and AF publish an assignment message; SB and AB do not.
constexpr bool needs_public_channel(Scheme s) {
  return s == Scheme::AdaptiveAggregated || s == Scheme::AdaptiveFraming;
}

}  // namespace qkd
