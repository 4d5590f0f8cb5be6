#include "qkd/binning.hpp"

#include <algorithm>
#include <string>

#include "qkd/detail/bits.hpp"
#include "qkd/errors.hpp"

namespace qkd {

namespace {

struct BinScan {
  int occupied_bins = 0;
  int empty_bins = 0;
  int first_occupied = -1;
  int first_empty = -1;
};

BinScan scan_bins(const Frame& frame, int k) {
  BinScan scan;
  const int bins = frame.length() / k;
  for (int b = 0; b < bins; ++b) {
    bool occ = false;
    for (int u = b * k; u < (b + 1) * k; ++u) {
      if (frame.occupied(u)) {
        occ = true;
        break;
      }
    }
    if (occ) {
      if (scan.first_occupied < 0) scan.first_occupied = b;
      ++scan.occupied_bins;
    } else {
      if (scan.first_empty < 0) scan.first_empty = b;
      ++scan.empty_bins;
    }
  }
  return scan;
}

std::vector<int> units_with(const Frame& frame, bool occupied) {
  std::vector<int> out;
  for (int u = 0; u < frame.length(); ++u) {
    if (frame.occupied(u) == occupied) out.push_back(u);
  }
  return out;
}

}  // namespace

BinGeometry::BinGeometry(int n, int k) : n_(n), k_(k) {
  if (n < 2 || !detail::is_pow2(n)) {
    throw ConfigError("frame length must be a power of two >= 2, got " + std::to_string(n));
  }
  if (k < 1 || k > n || !detail::is_pow2(k)) {
    throw ConfigError("bin size must be a power of two in [1, n], got k=" + std::to_string(k) +
                      " for n=" + std::to_string(n));
  }
}

SubframePartition subframe_sizes(int n, int g) {
  if (g < 1) {
    throw std::domain_error("group count must be >= 1");
  }
  if (n < 1 || g > n) {
    throw std::domain_error("group count must not exceed n");
  }
  SubframePartition part;
  part.group_count = g;
  part.m = n / g;
  part.r = n % g;
  part.sizes.reserve(static_cast<std::size_t>(g));
  for (int j = 0; j < g; ++j) {
    part.sizes.push_back(part.m + (j < part.r ? 1 : 0));
  }
  return part;
}

std::optional<KeyMaterial> simple_binning_encode(const Frame& frame, int k) {
  const BinGeometry geom(frame.length(), k);
  if (k == frame.length()) {
    return std::nullopt;  // single bin, zero-bit label
  }
  const BinScan scan = scan_bins(frame, k);
  const int bins = geom.bin_count();
  KeyMaterial key;
  if (scan.occupied_bins == 1) {
    key.push(static_cast<std::uint32_t>(scan.first_occupied), static_cast<std::uint32_t>(bins));
  } else if (scan.empty_bins == 1) {
    key.push(static_cast<std::uint32_t>(scan.first_empty), static_cast<std::uint32_t>(bins));
  } else {
    return std::nullopt;
  }
  return key;
}

int adaptive_minimal_bin_size(const Frame& frame) {
  for (int k = 1;; k *= 2) {
    const BinScan scan = scan_bins(frame, k);
    if (scan.occupied_bins == 1 || scan.empty_bins == 1) {
      return k;
    }
  }
}

std::optional<KeyMaterial> adaptive_binning_encode(const Frame& frame) {
  const int k = adaptive_minimal_bin_size(frame);
  if (k == frame.length()) {
    return std::nullopt;
  }
  return simple_binning_encode(frame, k);
}

std::optional<EncodedFrame> aab_encode(const Frame& frame, RngStream& rng) {
  const int n = frame.length();
  const int photons = frame.photon_count();
  if (photons == 0 || photons == n) {
    return std::nullopt;
  }

  const bool pack_photons = photons <= n / 2;
  const int k = pack_photons ? 1 << detail::ceil_log2(photons)
                             : 1 << detail::floor_log2(n - photons);
  const int groups = n / k;
  const int chosen = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(groups)));

  std::vector<std::uint16_t> group_of(static_cast<std::size_t>(n), 0);
  std::vector<int> empties = units_with(frame, false);
  rng.shuffle(empties);

  // Fill the marked group, then deal the rest k per group in shuffled order.
  std::vector<int> rest;
  if (pack_photons) {
    for (int u : units_with(frame, true)) {
      group_of[static_cast<std::size_t>(u)] = static_cast<std::uint16_t>(chosen);
    }
    for (int i = 0; i < k - photons; ++i) {
      group_of[static_cast<std::size_t>(empties[static_cast<std::size_t>(i)])] =
          static_cast<std::uint16_t>(chosen);
    }
    rest.assign(empties.begin() + (k - photons), empties.end());
  } else {
    for (int i = 0; i < k; ++i) {
      group_of[static_cast<std::size_t>(empties[static_cast<std::size_t>(i)])] =
          static_cast<std::uint16_t>(chosen);
    }
    rest = units_with(frame, true);
    rest.insert(rest.end(), empties.begin() + k, empties.end());
    std::sort(rest.begin(), rest.end());
    rng.shuffle(rest);
  }

  std::size_t next = 0;
  for (int g = 0; g < groups; ++g) {
    if (g == chosen) continue;
    for (int i = 0; i < k; ++i) {
      group_of[static_cast<std::size_t>(rest[next++])] = static_cast<std::uint16_t>(g);
    }
  }

  EncodedFrame out;
  out.key.push(static_cast<std::uint32_t>(chosen), static_cast<std::uint32_t>(groups));
  out.message.scheme = Scheme::AdaptiveAggregated;
  out.message.group_count = static_cast<std::uint16_t>(groups);
  out.message.group_of_unit = std::move(group_of);
  return out;
}

std::optional<EncodedFrame> af_encode(const Frame& frame, RngStream& rng) {
  const int n = frame.length();
  const int photons = frame.photon_count();
  if (photons == 0 || photons == n) {
    return std::nullopt;
  }

  // One subframe per marked unit: occupied units for l <= n/2, empty ones
  // otherwise. Seeds are taken in ascending unit order.
  const bool mark_occupied = photons <= n / 2;
  const std::vector<int> seeds = units_with(frame, mark_occupied);
  std::vector<int> pool = units_with(frame, !mark_occupied);
  const int groups = static_cast<int>(seeds.size());

  std::vector<std::vector<int>> members(static_cast<std::size_t>(groups));
  for (int j = 0; j < groups; ++j) {
    members[static_cast<std::size_t>(j)].push_back(seeds[static_cast<std::size_t>(j)]);
  }

  // Round-robin from subframe 0: each picks one random unassigned unit until
  // none remain, leaving the lowest-indexed subframes one unit larger.
  int turn = 0;
  while (!pool.empty()) {
    const auto pick = rng.next_below(static_cast<std::uint32_t>(pool.size()));
    members[static_cast<std::size_t>(turn)].push_back(pool[pick]);
    pool[pick] = pool.back();
    pool.pop_back();
    turn = (turn + 1) % groups;
  }

  EncodedFrame out;
  out.message.scheme = Scheme::AdaptiveFraming;
  out.message.group_count = static_cast<std::uint16_t>(groups);
  out.message.group_of_unit.assign(static_cast<std::size_t>(n), 0);
  for (int j = 0; j < groups; ++j) {
    auto& subframe = members[static_cast<std::size_t>(j)];
    for (int u : subframe) {
      out.message.group_of_unit[static_cast<std::size_t>(u)] = static_cast<std::uint16_t>(j);
    }
    // Symbol = rank of the seed among the subframe's units in time order.
    std::sort(subframe.begin(), subframe.end());
    const auto rank = std::lower_bound(subframe.begin(), subframe.end(),
                                       seeds[static_cast<std::size_t>(j)]) -
                      subframe.begin();
    out.key.push(static_cast<std::uint32_t>(rank), static_cast<std::uint32_t>(subframe.size()));
  }
  return out;
}

void validate_assignment(const AssignmentMessage& message) {
  const int n = static_cast<int>(message.group_of_unit.size());
  const int groups = message.group_count;
  if (!needs_public_channel(message.scheme)) {
    throw ProtocolError("assignment message carries an SB/AB tag");
  }
  if (n < 2 || !detail::is_pow2(n)) {
    throw ProtocolError("assignment map length must be a power of two >= 2");
  }
  if (groups < 1 || groups > n) {
    throw ProtocolError("group count out of range");
  }
  std::vector<int> size_of(static_cast<std::size_t>(groups), 0);
  for (std::uint16_t g : message.group_of_unit) {
    if (g >= message.group_count) {
      throw ProtocolError("group index out of range");
    }
    ++size_of[g];
  }
  if (message.scheme == Scheme::AdaptiveAggregated) {
    if (n % groups != 0 || !detail::is_pow2(n / groups)) {
      throw ProtocolError("aggregated binning requires a power-of-two bin size");
    }
    for (int s : size_of) {
      if (s != n / groups) {
        throw ProtocolError("aggregated binning groups must all have size n/m");
      }
    }
  } else {
    if (groups > n / 2) {
      // Framing seeds the minority side, so m >= 2 and every radix >= 2.
      throw ProtocolError("framing group count must not exceed n/2");
    }
    const int m = n / groups;
    const int r = n % groups;
    int larger = 0;
    for (int s : size_of) {
      if (s == m + 1) {
        ++larger;
      } else if (s != m) {
        throw ProtocolError("framing subframe sizes must be m or m+1");
      }
    }
    if (larger != r) {
      throw ProtocolError("framing subframe size multiset must be balanced");
    }
  }
}

std::optional<KeyMaterial> decode_with_assignment(const Frame& frame,
                                                  const AssignmentMessage& message) {
  validate_assignment(message);
  if (frame.length() != static_cast<int>(message.group_of_unit.size())) {
    throw ProtocolError("frame length does not match the assignment map");
  }

  const int groups = message.group_count;
  std::vector<std::vector<int>> members(static_cast<std::size_t>(groups));
  std::vector<int> occupied_in(static_cast<std::size_t>(groups), 0);
  for (int u = 0; u < frame.length(); ++u) {
    const auto g = message.group_of_unit[static_cast<std::size_t>(u)];
    members[g].push_back(u);  // ascending by construction
    if (frame.occupied(u)) ++occupied_in[g];
  }

  KeyMaterial key;
  if (message.scheme == Scheme::AdaptiveAggregated) {
    int occupied_groups = 0;
    int empty_groups = 0;
    int first_occupied = -1;
    int first_empty = -1;
    for (int g = 0; g < groups; ++g) {
      if (occupied_in[static_cast<std::size_t>(g)] > 0) {
        if (first_occupied < 0) first_occupied = g;
        ++occupied_groups;
      } else {
        if (first_empty < 0) first_empty = g;
        ++empty_groups;
      }
    }
    // Occupied marker wins the two-group tie, matching the encoder.
    if (occupied_groups == 1) {
      key.push(static_cast<std::uint32_t>(first_occupied), static_cast<std::uint32_t>(groups));
    } else if (empty_groups == 1) {
      key.push(static_cast<std::uint32_t>(first_empty), static_cast<std::uint32_t>(groups));
    } else {
      return std::nullopt;
    }
    return key;
  }

  bool one_occupied_each = true;
  bool one_empty_each = true;
  for (int g = 0; g < groups; ++g) {
    const int occ = occupied_in[static_cast<std::size_t>(g)];
    const int size = static_cast<int>(members[static_cast<std::size_t>(g)].size());
    if (occ != 1) one_occupied_each = false;
    if (size - occ != 1) one_empty_each = false;
  }
  if (!one_occupied_each && !one_empty_each) {
    return std::nullopt;
  }
  const bool mark_occupied = one_occupied_each;  // tie resolved like the encoder
  for (int g = 0; g < groups; ++g) {
    const auto& subframe = members[static_cast<std::size_t>(g)];
    for (std::size_t i = 0; i < subframe.size(); ++i) {
      if (frame.occupied(subframe[i]) == mark_occupied) {
        key.push(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(subframe.size()));
        break;
      }
    }
  }
  return key;
}

}  // namespace qkd
