#include "qkd/oracle.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "qkd/arrival_model.hpp"
#include "qkd/binning.hpp"
#include "qkd/detail/bits.hpp"
#include "qkd/detail/parallel.hpp"
#include "qkd/detail/sums.hpp"
#include "qkd/errors.hpp"

namespace qkd {

namespace {

constexpr int kMaxEnumeration = 20;

// --- local per-frame bit logic (independent of the production encoders) ---

struct MaskBinScan {
  int occupied = 0;
  int empty = 0;
};

MaskBinScan scan_mask(std::uint32_t mask, int n, int k) {
  MaskBinScan s;
  const std::uint32_t bin_mask = (k >= 32) ? 0xFFFFFFFFu : ((1u << k) - 1u);
  for (int b = 0; b < n / k; ++b) {
    if ((mask >> (b * k)) & bin_mask) {
      ++s.occupied;
    } else {
      ++s.empty;
    }
  }
  return s;
}

double sb_mask_bits(std::uint32_t mask, int n, int k) {
  if (k == n) return 0.0;
  const MaskBinScan s = scan_mask(mask, n, k);
  if (s.occupied == 1 || s.empty == 1) {
    return std::log2(static_cast<double>(n / k));
  }
  return 0.0;
}

double ab_mask_bits(std::uint32_t mask, int n) {
  for (int k = 1; k < n; k *= 2) {
    const MaskBinScan s = scan_mask(mask, n, k);
    if (s.occupied == 1 || s.empty == 1) {
      return std::log2(static_cast<double>(n / k));
    }
  }
  return 0.0;  // minimal satisfying size is the whole frame
}

double aab_count_bits(int n, int photons) {
  if (photons == 0 || photons == n) return 0.0;
  if (photons <= n / 2) {
    return static_cast<double>(detail::floor_log2(n) - detail::ceil_log2(photons));
  }
  return static_cast<double>(detail::floor_log2(n) - detail::floor_log2(n - photons));
}

double af_count_bits(int n, int photons) {
  if (photons == 0 || photons == n) return 0.0;
  const int groups = photons <= n / 2 ? photons : n - photons;
  // Sum log2 over the balanced group sizes directly.
  double bits = 0.0;
  int left = n;
  for (int j = 0; j < groups; ++j) {
    const int size = (left + (groups - 1 - j)) / (groups - j);  // ceil of the remainder split
    bits += std::log2(static_cast<double>(size));
    left -= size;
  }
  return bits;
}

double frame_bits(Scheme scheme, std::uint32_t mask, int n, int photons, int k) {
  switch (scheme) {
    case Scheme::SimpleBinning: return sb_mask_bits(mask, n, k);
    case Scheme::AdaptiveBinning: return ab_mask_bits(mask, n);
    case Scheme::AdaptiveAggregated: return aab_count_bits(n, photons);
    case Scheme::AdaptiveFraming: return af_count_bits(n, photons);
  }
  return 0.0;
}

std::vector<double> power_table(double x, int n) {
  std::vector<double> t(static_cast<std::size_t>(n) + 1, 1.0);
  for (int i = 1; i <= n; ++i) t[static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(i - 1)] * x;
  return t;
}

}  // namespace

double EnumerationProfile::rate(double p) const {
  const auto pp = power_table(p, n);
  const auto qq = power_table(1.0 - p, n);
  detail::NeumaierSum s;
  for (int c = 0; c <= n; ++c) {
    s.add(bits_by_count[static_cast<std::size_t>(c)] * pp[static_cast<std::size_t>(c)] *
          qq[static_cast<std::size_t>(n - c)]);
  }
  return s.value() / n;
}

double EnumerationProfile::accepted_probability(double p) const {
  const auto pp = power_table(p, n);
  const auto qq = power_table(1.0 - p, n);
  detail::NeumaierSum s;
  for (int c = 0; c <= n; ++c) {
    s.add(accepted_by_count[static_cast<std::size_t>(c)] * pp[static_cast<std::size_t>(c)] *
          qq[static_cast<std::size_t>(n - c)]);
  }
  return s.value();
}

EnumerationProfile enumerate_profile(Scheme scheme, int n, std::optional<int> k) {
  if (n > kMaxEnumeration) {
    throw BudgetError("enumeration over 2^n frames is capped at n <= " +
                      std::to_string(kMaxEnumeration));
  }
  if (n < 2 || !detail::is_pow2(n)) {
    throw ConfigError("frame length must be a power of two >= 2");
  }
  int bin_size = 0;
  if (scheme == Scheme::SimpleBinning) {
    if (!k) throw ConfigError("simple binning needs a bin size k");
    bin_size = *k;
    if (bin_size < 1 || bin_size > n || !detail::is_pow2(bin_size)) {
      throw ConfigError("bin size must be a power of two in [1, n]");
    }
  }

  EnumerationProfile prof;
  prof.scheme = scheme;
  prof.n = n;
  prof.k = k;
  prof.bits_by_count.assign(static_cast<std::size_t>(n) + 1, 0.0);
  prof.accepted_by_count.assign(static_cast<std::size_t>(n) + 1, 0.0);

  const std::uint32_t frames = 1u << n;
  for (std::uint32_t mask = 0; mask < frames; ++mask) {
    const int photons = std::popcount(mask);
    const double bits = frame_bits(scheme, mask, n, photons, bin_size);
    if (bits > 0.0) {
      prof.bits_by_count[static_cast<std::size_t>(photons)] += bits;
      prof.accepted_by_count[static_cast<std::size_t>(photons)] += 1.0;
    }
  }
  return prof;
}

EnumeratedRate enumerate_rate(Scheme scheme, double p, int n, std::optional<int> k) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("probability must be in [0, 1]");
  }
  const EnumerationProfile prof = enumerate_profile(scheme, n, k);
  return {scheme, n, k, p, prof.rate(p), prof.accepted_probability(p)};
}

MonteCarloEstimate monte_carlo_rate(Scheme scheme, double p, int n, std::optional<int> k,
                                    std::uint64_t trials, std::uint64_t seed) {
  if (trials < 1) {
    throw ConfigError("trials must be >= 1");
  }
  const ModelParams params(p);
  if (scheme == Scheme::SimpleBinning && !k) {
    throw ConfigError("simple binning needs a bin size k");
  }
  // Validate geometry before the parallel section; a throw inside a worker
  // thread would terminate instead of propagating.
  const int bin_size = k.value_or(1);
  if (scheme == Scheme::SimpleBinning) {
    (void)BinGeometry(n, bin_size);
  } else {
    (void)Frame(n);
  }

  std::vector<double> per_unit(trials, 0.0);
  detail::parallel_for(trials, [&](std::uint64_t t) {
    RngStream rng(seed, t);
    const Frame frame = sample_frame(params, n, rng);
    double bits = 0.0;
    switch (scheme) {
      case Scheme::SimpleBinning: {
        if (const auto key = simple_binning_encode(frame, bin_size)) bits = key->bit_count();
        break;
      }
      case Scheme::AdaptiveBinning: {
        if (const auto key = adaptive_binning_encode(frame)) bits = key->bit_count();
        break;
      }
      case Scheme::AdaptiveAggregated: {
        if (const auto enc = aab_encode(frame, rng)) bits = enc->key.bit_count();
        break;
      }
      case Scheme::AdaptiveFraming: {
        if (const auto enc = af_encode(frame, rng)) bits = enc->key.bit_count();
        break;
      }
    }
    per_unit[t] = bits / n;
  });

  const double mean = detail::pairwise_sum(per_unit) / static_cast<double>(trials);
  double se = 0.0;
  if (trials > 1) {
    std::vector<double> sq(trials);
    for (std::uint64_t t = 0; t < trials; ++t) {
      const double d = per_unit[t] - mean;
      sq[t] = d * d;
    }
    const double var = detail::pairwise_sum(sq) / static_cast<double>(trials - 1);
    se = std::sqrt(var / static_cast<double>(trials));
  }
  return {mean, se, trials};
}

bool partition_bound_check(int n, int g, const std::vector<int>& sizes) {
  if (static_cast<int>(sizes.size()) != g || g < 1) {
    throw std::domain_error("need exactly g sizes");
  }
  int sum = 0;
  for (int d : sizes) {
    if (d < 1) throw std::domain_error("group sizes must be positive");
    sum += d;
  }
  if (sum != n) {
    throw std::domain_error("group sizes must sum to n");
  }
  const int m = n / g;
  const int r = n % g;
  double lhs = 0.0;
  for (int d : sizes) lhs += std::log2(static_cast<double>(d));
  const double rhs = r * std::log2(static_cast<double>(m + 1)) +
                     (g - r) * std::log2(static_cast<double>(m));
  return lhs <= rhs + 1e-9;
}

}  // namespace qkd
