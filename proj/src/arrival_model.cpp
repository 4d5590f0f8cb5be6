#include "qkd/arrival_model.hpp"

#include <cmath>
#include <string>

#include "qkd/detail/bits.hpp"
#include "qkd/errors.hpp"

namespace qkd {

namespace {

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("probability must be in [0, 1], got " + std::to_string(p));
  }
}

void check_frame_length(int n) {
  if (n < 2 || !detail::is_pow2(n)) {
    throw ConfigError("frame length must be a power of two >= 2, got " + std::to_string(n));
  }
}

}  // namespace

ModelParams::ModelParams(double p) : p_(p) {
  check_probability(p);
}

Frame::Frame(int n) : n_(n) {
  check_frame_length(n);
  occ_.assign(static_cast<std::size_t>(n), 0);
}

Frame Frame::from_mask(int n, std::uint64_t mask) {
  Frame f(n);
  if (n > 64) {
    throw ConfigError("from_mask supports n <= 64");
  }
  for (int u = 0; u < n; ++u) {
    f.occ_[static_cast<std::size_t>(u)] = static_cast<std::uint8_t>((mask >> u) & 1u);
  }
  return f;
}

Frame Frame::from_units(int n, const std::vector<int>& occupied_units) {
  Frame f(n);
  for (int u : occupied_units) {
    f.set(u, true);
  }
  return f;
}

void Frame::set(int unit, bool value) {
  if (unit < 0 || unit >= n_) {
    throw ConfigError("unit index out of range");
  }
  occ_[static_cast<std::size_t>(unit)] = value ? 1 : 0;
}

int Frame::photon_count() const {
  int count = 0;
  for (std::uint8_t o : occ_) count += o;
  return count;
}

std::uint64_t Frame::mask() const {
  if (n_ > 64) {
    throw ConfigError("mask() supports n <= 64");
  }
  std::uint64_t m = 0;
  for (int u = 0; u < n_; ++u) {
    if (occ_[static_cast<std::size_t>(u)]) m |= std::uint64_t{1} << u;
  }
  return m;
}

Frame sample_frame(const ModelParams& params, int n, RngStream& rng) {
  Frame f(n);
  for (int u = 0; u < n; ++u) {
    f.set(u, rng.next_double() < params.p());
  }
  return f;
}

int photon_count(const Frame& frame) {
  return frame.photon_count();
}

double binary_entropy(double p) {
  check_probability(p);
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

BinOccupancy bin_occupancy_probs(double p, int k) {
  check_probability(p);
  if (k < 1) {
    throw std::domain_error("bin size must be >= 1");
  }
  // 1 - empty rounds by at most 2^-54, so occupied + empty == 1.0 exactly.
  const double empty = std::pow(1.0 - p, k);
  return {1.0 - empty, empty};
}

}  // namespace qkd
