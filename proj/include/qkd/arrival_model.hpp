#pragma once

#include <cstdint>
#include <vector>

#include "qkd/rng.hpp"

namespace qkd {

// Bernoulli arrival model: one photon per time unit with probability p.
class ModelParams {
public:
  explicit ModelParams(double p);
  double p() const { return p_; }

private:
  double p_;
};

// A frame of n consecutive time units; flag set where a photon arrived.
// n must be a power of two, n >= 2. Units are zero-indexed.
class Frame {
public:
  explicit Frame(int n);

  // Low bit of `mask` is unit 0. Requires n <= 64.
  static Frame from_mask(int n, std::uint64_t mask);
  static Frame from_units(int n, const std::vector<int>& occupied_units);

  int length() const { return n_; }
  bool occupied(int unit) const { return occ_[static_cast<std::size_t>(unit)] != 0; }
  void set(int unit, bool value);
  int photon_count() const;
  std::uint64_t mask() const;  // n <= 64 only

  bool operator==(const Frame&) const = default;

private:
  int n_;
  std::vector<std::uint8_t> occ_;
};

// Each of the n flags drawn independently with probability p, consuming
// exactly n draws from rng (unit 0 first).
Frame sample_frame(const ModelParams& params, int n, RngStream& rng);

int photon_count(const Frame& frame);

// h(p) = -p log2 p - (1-p) log2(1-p); defined as 0 at p = 0 and p = 1.
double binary_entropy(double p);

// Occupancy probabilities of a k-unit bin: pi_k = 1-(1-p)^k and its
// complement. The pair sums to exactly 1.0 in double arithmetic.
struct BinOccupancy {
  double occupied;  // pi_k
  double empty;     // 1 - pi_k
};
BinOccupancy bin_occupancy_probs(double p, int k);

}  // namespace qkd
