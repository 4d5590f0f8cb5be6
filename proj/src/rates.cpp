#include "qkd/rates.hpp"

#include <cmath>
#include <string>

#include "qkd/arrival_model.hpp"
#include "qkd/detail/bits.hpp"
#include "qkd/detail/sums.hpp"
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

void check_geometry(int n, int k) {
  check_frame_length(n);
  if (k < 1 || k > n || !detail::is_pow2(k)) {
    throw ConfigError("bin size must be a power of two in [1, n], got k=" + std::to_string(k));
  }
}

// Binomial coefficient as a double. Relative error stays near 1 ulp per
// factor (~1e-14 at C(64,32)), far inside the 1e-10 oracle tolerance.
double binom(int a, int b) {
  if (b < 0 || b > a) return 0.0;
  b = std::min(b, a - b);
  double c = 1.0;
  for (int i = 1; i <= b; ++i) {
    c = c * static_cast<double>(a - b + i) / static_cast<double>(i);
  }
  return c;
}

double binom_pmf(int n, int count, double p) {
  return binom(n, count) * std::pow(p, count) * std::pow(1.0 - p, n - count);
}

}  // namespace

double rate_simple_binning(double p, int n, int k) {
  check_probability(p);
  check_geometry(n, k);
  if (k == n) {
    return 0.0;
  }
  const auto [occ, emp] = bin_occupancy_probs(p, k);
  if (2 * k == n) {
    // Two bins: one occupied and one empty are the same event, 1 bit.
    return occ * emp / k;
  }
  const int bins = n / k;
  const double one_occupied = occ * std::pow(emp, bins - 1);
  const double one_empty = std::pow(occ, bins - 1) * emp;
  return (one_occupied + one_empty) * std::log2(static_cast<double>(bins)) / k;
}

double rate_adaptive_binning(double p, int n) {
  check_probability(p);
  check_frame_length(n);
  if (n < 4) {
    throw std::domain_error("adaptive binning rate requires n >= 4");
  }
  const int log_n = detail::floor_log2(n);
  const double q = 1.0 - p;
  detail::NeumaierSum total;

  // Single-occupied-bin part: the per-photon-count sum over minimal bin
  // sizes 2^i collapses telescopically to sum_i p_{2^i}(l) / n.
  for (int photons = 1; photons <= n / 2; ++photons) {
    const double tail = std::pow(p, photons) * std::pow(q, n - photons);
    for (int i = detail::ceil_log2(photons); i <= log_n - 1; ++i) {
      total.add(binom(1 << i, photons) * tail / (1 << i));
    }
  }

  // Single-empty-bin part for bin sizes up to n/4; size n/2 coincides with
  // the single-occupied case and is already counted above.
  for (int i = 0; i <= log_n - 2; ++i) {
    const int k = 1 << i;
    const auto [occ, emp] = bin_occupancy_probs(p, k);
    total.add(std::pow(occ, n / k - 1) * emp * static_cast<double>(log_n - i) / k);
  }
  return total.value();
}

double rate_aab(double p, int n) {
  check_probability(p);
  check_frame_length(n);
  detail::NeumaierSum total;
  for (int photons = 1; photons <= n - 1; ++photons) {
    total.add(binom_pmf(n, photons, p) * aggregated_frame_bits(n, photons));
  }
  return total.value() / n;
}

double rate_af(double p, int n) {
  check_probability(p);
  check_frame_length(n);
  detail::NeumaierSum total;
  for (int photons = 1; photons <= n - 1; ++photons) {
    total.add(binom_pmf(n, photons, p) * framing_frame_bits(n, photons));
  }
  return total.value() / n;
}

double scheme_rate(Scheme scheme, double p, int n, std::optional<int> k) {
  switch (scheme) {
    case Scheme::SimpleBinning:
      if (!k) throw ConfigError("simple binning needs a bin size k");
      return rate_simple_binning(p, n, *k);
    case Scheme::AdaptiveBinning:
      return rate_adaptive_binning(p, n);
    case Scheme::AdaptiveAggregated:
      return rate_aab(p, n);
    case Scheme::AdaptiveFraming:
      return rate_af(p, n);
  }
  throw ConfigError("unknown scheme");
}

double effective_rate(double raw_rate, int n, const TimingParams& timing) {
  if (raw_rate < 0.0) {
    throw std::domain_error("raw rate must be >= 0");
  }
  if (!(timing.unit_seconds > 0.0) || timing.channel_seconds < 0.0) {
    throw std::domain_error("timing requires T > 0 and D >= 0");
  }
  const double sensing = n * timing.unit_seconds;
  return raw_rate * (sensing / (sensing + timing.channel_seconds));
}

double utilization(double raw_rate, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("utilization is defined for p strictly inside (0, 1)");
  }
  return raw_rate / binary_entropy(p);
}

double aggregated_frame_bits(int n, int photons) {
  if (photons <= 0 || photons >= n) {
    return 0.0;
  }
  const int log_n = detail::floor_log2(n);
  if (photons <= n / 2) {
    return static_cast<double>(log_n - detail::ceil_log2(photons));
  }
  return static_cast<double>(log_n - detail::floor_log2(n - photons));
}

double framing_frame_bits(int n, int photons) {
  if (photons <= 0 || photons >= n) {
    return 0.0;
  }
  const int groups = photons <= n / 2 ? photons : n - photons;
  return balanced_partition_bits(n, groups);
}

double balanced_partition_bits(int n, int g) {
  if (g < 1 || g > n) {
    throw std::domain_error("group count must be in [1, n]");
  }
  const int m = n / g;
  const int r = n % g;
  return r * std::log2(static_cast<double>(m + 1)) +
         (g - r) * std::log2(static_cast<double>(m));
}

}  // namespace qkd
