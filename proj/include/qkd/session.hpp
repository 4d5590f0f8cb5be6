#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qkd/binning.hpp"
#include "qkd/key_material.hpp"
#include "qkd/rates.hpp"
#include "qkd/scheme.hpp"

namespace qkd {

struct SessionConfig {
  Scheme scheme = Scheme::AdaptiveFraming;
  int n = 8;
  std::optional<int> k;  // simple binning only
  double p = 0.1;
  std::uint64_t frame_count = 1;
  std::uint64_t master_seed = 0;
  TimingParams timing;
};

struct SessionReport {
  std::vector<KeyMaterial> alice_key;  // one entry per accepted frame
  std::vector<KeyMaterial> bob_key;
  bool keys_agree = true;
  double total_bits = 0.0;
  std::uint64_t frames_used = 0;
  std::uint64_t frames_discarded = 0;
  std::uint64_t windows = 0;
  double elapsed_model_time = 0.0;       // windows*(nT+D) with D = 0 for SB/AB
  double effective_rate_observed = 0.0;  // total_bits / (elapsed / T)
  std::uint64_t public_channel_bytes = 0;
};

// One paired Alice/Bob run over an ideal quantum channel. Both parties see
// the identical sampled frame; for AAB/AF the assignment message crosses a
// serialized public channel and Bob recomputes his symbols from his own
// occupancy plus the map. Frame sampling uses stream 0 of the master seed,
// Alice's encoder randomness stream 1.
SessionReport run_session(const SessionConfig& config);

// Wire format, little-endian: magic "QKDB", version u8 (=1), scheme tag u8,
// frame_index u64, n u16, group_count u16, n group indices u16 each, CRC-32
// of everything preceding. deserialize(serialize(m)) == m bit-exactly.
std::vector<std::uint8_t> serialize_message(const AssignmentMessage& message);
AssignmentMessage deserialize_message(std::span<const std::uint8_t> bytes);

// Report as a JSON document; key symbols listed as value/radix pairs.
std::string session_report_json(const SessionConfig& config, const SessionReport& report);

}  // namespace qkd
