#include "qkd/session.hpp"

#include <string>

#include <json.hpp>

#include "qkd/arrival_model.hpp"
#include "qkd/detail/crc32.hpp"
#include "qkd/errors.hpp"
#include "qkd/rng.hpp"

namespace qkd {

namespace {

constexpr std::uint8_t kWireVersion = 1;
constexpr std::size_t kHeaderBytes = 4 + 1 + 1 + 8 + 2 + 2;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[at + static_cast<std::size_t>(i)];
  return v;
}

std::uint64_t get_u64(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[at + static_cast<std::size_t>(i)];
  return v;
}

}  // namespace

std::vector<std::uint8_t> serialize_message(const AssignmentMessage& message) {
  if (!needs_public_channel(message.scheme)) {
    throw WireError("only AAB/AF messages exist on the wire");
  }
  const std::size_t n = message.group_of_unit.size();
  if (n == 0 || n > 0xFFFF) {
    throw WireError("unit count must fit u16");
  }
  if (message.group_count == 0) {
    throw WireError("group count must be >= 1");
  }
  for (std::uint16_t g : message.group_of_unit) {
    if (g >= message.group_count) {
      throw WireError("group index exceeds group count");
    }
  }

  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + 2 * n + 4);
  for (char c : {'Q', 'K', 'D', 'B'}) out.push_back(static_cast<std::uint8_t>(c));
  out.push_back(kWireVersion);
  out.push_back(static_cast<std::uint8_t>(message.scheme));
  put_u64(out, message.frame_index);
  put_u16(out, static_cast<std::uint16_t>(n));
  put_u16(out, message.group_count);
  for (std::uint16_t g : message.group_of_unit) put_u16(out, g);
  put_u32(out, detail::crc32({out.data(), out.size()}));
  return out;
}

AssignmentMessage deserialize_message(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes + 4) {
    throw WireError("message truncated");
  }
  if (bytes[0] != 'Q' || bytes[1] != 'K' || bytes[2] != 'D' || bytes[3] != 'B') {
    throw WireError("bad magic");
  }
  if (bytes[4] != kWireVersion) {
    throw WireError("unsupported format version " + std::to_string(bytes[4]));
  }
  const std::uint8_t tag = bytes[5];
  if (tag != static_cast<std::uint8_t>(Scheme::AdaptiveAggregated) &&
      tag != static_cast<std::uint8_t>(Scheme::AdaptiveFraming)) {
    throw WireError("scheme tag has no wire form");
  }
  const std::uint16_t n = get_u16(bytes, 14);
  if (bytes.size() != kHeaderBytes + 2 * static_cast<std::size_t>(n) + 4) {
    throw WireError("length field does not match payload size");
  }
  const std::uint32_t stored_crc = get_u32(bytes, bytes.size() - 4);
  if (detail::crc32(bytes.first(bytes.size() - 4)) != stored_crc) {
    throw WireError("CRC mismatch");
  }

  AssignmentMessage msg;
  msg.scheme = static_cast<Scheme>(tag);
  msg.frame_index = get_u64(bytes, 6);
  msg.group_count = get_u16(bytes, 16);
  if (msg.group_count == 0) {
    throw WireError("group count must be >= 1");
  }
  msg.group_of_unit.resize(n);
  for (std::size_t u = 0; u < n; ++u) {
    msg.group_of_unit[u] = get_u16(bytes, kHeaderBytes + 2 * u);
    if (msg.group_of_unit[u] >= msg.group_count) {
      throw WireError("group index exceeds group count");
    }
  }
  return msg;
}

SessionReport run_session(const SessionConfig& config) {
  if (config.frame_count < 1) {
    throw ConfigError("frame_count must be >= 1");
  }
  if (config.scheme == Scheme::SimpleBinning) {
    if (!config.k) throw ConfigError("simple binning needs a bin size k");
    (void)BinGeometry(config.n, *config.k);
  } else {
    (void)Frame(config.n);
  }
  if (config.scheme == Scheme::AdaptiveBinning && config.n < 4) {
    throw ConfigError("adaptive binning needs n >= 4");
  }
  if (!(config.timing.unit_seconds > 0.0) || config.timing.channel_seconds < 0.0) {
    throw ConfigError("timing requires T > 0 and D >= 0");
  }
  const ModelParams params(config.p);

  RngStream sample_rng(config.master_seed, 0);
  RngStream alice_rng(config.master_seed, 1);

  SessionReport rep;
  for (std::uint64_t i = 0; i < config.frame_count; ++i) {
    const Frame frame = sample_frame(params, config.n, sample_rng);

    std::optional<KeyMaterial> alice;
    std::optional<KeyMaterial> bob;
    switch (config.scheme) {
      case Scheme::SimpleBinning:
        alice = simple_binning_encode(frame, *config.k);
        bob = simple_binning_encode(frame, *config.k);  // Bob re-derives, no message
        break;
      case Scheme::AdaptiveBinning:
        alice = adaptive_binning_encode(frame);
        bob = adaptive_binning_encode(frame);
        break;
      case Scheme::AdaptiveAggregated:
      case Scheme::AdaptiveFraming: {
        auto enc = config.scheme == Scheme::AdaptiveAggregated ? aab_encode(frame, alice_rng)
                                                               : af_encode(frame, alice_rng);
        if (enc) {
          enc->message.frame_index = i;
          const auto wire = serialize_message(enc->message);
          rep.public_channel_bytes += wire.size();
          const AssignmentMessage received = deserialize_message(wire);
          alice = std::move(enc->key);
          bob = decode_with_assignment(frame, received);
        }
        break;
      }
    }

    if (alice.has_value() != bob.has_value() || (alice && *alice != *bob)) {
      rep.keys_agree = false;
    }
    if (alice) {
      ++rep.frames_used;
      rep.total_bits += alice->bit_count();
      rep.alice_key.push_back(*alice);
      rep.bob_key.push_back(bob.value_or(KeyMaterial{}));
    } else {
      ++rep.frames_discarded;
    }
  }

  rep.windows = config.frame_count;
  const double window_seconds =
      config.n * config.timing.unit_seconds +
      (needs_public_channel(config.scheme) ? config.timing.channel_seconds : 0.0);
  rep.elapsed_model_time = static_cast<double>(rep.windows) * window_seconds;
  rep.effective_rate_observed =
      rep.total_bits / (rep.elapsed_model_time / config.timing.unit_seconds);
  return rep;
}

std::string session_report_json(const SessionConfig& config, const SessionReport& report) {
  nlohmann::ordered_json doc;
  doc["config"] = {
      {"scheme", to_string(config.scheme)},
      {"n", config.n},
      {"p", config.p},
      {"frames", config.frame_count},
      {"seed", config.master_seed},
      {"T_seconds", config.timing.unit_seconds},
      {"D_seconds", config.timing.channel_seconds},
  };
  if (config.k) doc["config"]["k"] = *config.k;

  auto keys = [](const std::vector<KeyMaterial>& all) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& key : all) {
      for (const Symbol& s : key.symbols()) {
        arr.push_back({s.value, s.radix});
      }
    }
    return arr;
  };
  doc["alice_key"] = keys(report.alice_key);
  doc["bob_key"] = keys(report.bob_key);
  doc["keys_agree"] = report.keys_agree;
  doc["total_bits"] = report.total_bits;
  doc["frames_used"] = report.frames_used;
  doc["frames_discarded"] = report.frames_discarded;
  doc["windows"] = report.windows;
  doc["elapsed_model_time_seconds"] = report.elapsed_model_time;
  doc["effective_rate_observed"] = report.effective_rate_observed;
  doc["public_channel_bytes"] = report.public_channel_bytes;
  return doc.dump(2);
}

}  // namespace qkd
