#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qkd/scheme.hpp"

namespace qkd {

struct EnumeratedRate {
  Scheme scheme;
  int n;
  std::optional<int> k;
  double p;
  double expected_bits_per_unit;
  double frames_accepted_probability;
};

struct MonteCarloEstimate {
  double mean_bits_per_unit;
  double standard_error;  // sample stddev / sqrt(trials)
  std::uint64_t trials;
};

// Per-photon-count sums from one pass over all 2^n occupancy patterns,
// reusable across p. The per-frame bit logic here is written independently
// of the production encoders so formula/encoder/enumeration stay three
// separate routes to the same numbers.
struct EnumerationProfile {
  Scheme scheme;
  int n;
  std::optional<int> k;
  std::vector<double> bits_by_count;      // summed frame bits, index = photon count
  std::vector<double> accepted_by_count;  // number of accepted frames

  double rate(double p) const;
  double accepted_probability(double p) const;
};

// n <= 20 (2^n enumeration budget), throws BudgetError beyond.
EnumerationProfile enumerate_profile(Scheme scheme, int n, std::optional<int> k = std::nullopt);
EnumeratedRate enumerate_rate(Scheme scheme, double p, int n,
                              std::optional<int> k = std::nullopt);

// Samples frames and runs the real encoders (including their randomness).
// Trial t draws from stream (seed, t); the reduction is fixed-order pairwise,
// so results do not depend on how trials are split across threads.
MonteCarloEstimate monte_carlo_rate(Scheme scheme, double p, int n, std::optional<int> k,
                                    std::uint64_t trials, std::uint64_t seed);

// Balanced-partition bound: for any split of n units into g nonempty groups of sizes d_i,
// sum(log2 d_i) <= r*log2(m+1) + (g-r)*log2(m). Sizes must sum to n.
bool partition_bound_check(int n, int g, const std::vector<int>& sizes);

}  // namespace qkd
