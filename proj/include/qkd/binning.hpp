#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qkd/arrival_model.hpp"
#include "qkd/key_material.hpp"
#include "qkd/rng.hpp"
#include "qkd/scheme.hpp"

namespace qkd {

// Uniform split of an n-unit frame into n/k bins of k consecutive units;
// bin i covers [i*k, (i+1)*k). Both n and k must be powers of two, k <= n.
class BinGeometry {
public:
  BinGeometry(int n, int k);
  int n() const { return n_; }
  int k() const { return k_; }
  int bin_count() const { return n_ / k_; }

private:
  int n_;
  int k_;
};

// Public-channel payload for AAB/AF: the group index of every time unit.
struct AssignmentMessage {
  Scheme scheme = Scheme::AdaptiveAggregated;  // AdaptiveAggregated or AdaptiveFraming
  std::uint64_t frame_index = 0;
  std::uint16_t group_count = 0;
  std::vector<std::uint16_t> group_of_unit;  // length n

  bool operator==(const AssignmentMessage&) const = default;
};

// n = m*group_count + r split into r groups of size m+1 and the rest of size m.
struct SubframePartition {
  int group_count;
  int m;
  int r;
  std::vector<int> sizes;  // r entries of m+1, then group_count-r of m
};

SubframePartition subframe_sizes(int n, int g);

// Key plus the message Bob needs to locate his symbols (AAB/AF only).
struct EncodedFrame {
  KeyMaterial key;
  AssignmentMessage message;
};

// Fixed bin size k. Accepts only frames with exactly one occupied or exactly
// one empty bin; at bin_count == 2 both hold at once and the occupied bin's
// label is used. k == n carries log2(1) = 0 bits and is always discarded.
std::optional<KeyMaterial> simple_binning_encode(const Frame& frame, int k);

// Smallest power-of-two bin size whose uniform partition meets the binning
// conditions. A single-bin partition (k == n) always satisfies them, so the
// scan terminates; that case carries nothing and is discarded.
int adaptive_minimal_bin_size(const Frame& frame);
std::optional<KeyMaterial> adaptive_binning_encode(const Frame& frame);

// Adaptive aggregated binning: all photons are packed into one uniformly
// random group (or, for l > n/2, one group is filled with empty units); the
// group index is the key symbol.
std::optional<EncodedFrame> aab_encode(const Frame& frame, RngStream& rng);

// Adaptive framing: one subframe per occupied unit (per empty unit when
// l > n/2); each subframe yields the rank of its marked unit.
std::optional<EncodedFrame> af_encode(const Frame& frame, RngStream& rng);

// Bob's side: recompute key symbols from his own occupancy plus the group
// map. Returns nullopt when the occupancy is inconsistent with the scheme
// (a channel discrepancy); throws ProtocolError on a malformed partition.
std::optional<KeyMaterial> decode_with_assignment(const Frame& frame,
                                                  const AssignmentMessage& message);

// Partition rule check: every group index in [0, group_count) present, AAB
// groups all of equal power-of-two size, AF sizes balanced to {m, m+1}.
void validate_assignment(const AssignmentMessage& message);

}  // namespace qkd
