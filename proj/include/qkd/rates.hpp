#pragma once

#include <optional>

#include "qkd/scheme.hpp"

namespace qkd {

// T = seconds per time unit, D = public-channel time per window (seconds).
struct TimingParams {
  double unit_seconds = 1e-11;    // T; tens of picoseconds is typical
  double channel_seconds = 0.0;   // D
};

struct RateCurvePoint {
  Scheme scheme;
  int n;
  std::optional<int> k;  // simple binning only
  double p;
  double raw_rate;        // bits per time unit
  double utilization;     // raw_rate / h(p)
  double effective_rate;  // raw_rate * nT/(nT+D), D = 0 for SB/AB
};

// Closed-form raw key rates, in bits per time unit.
double rate_simple_binning(double p, int n, int k);
double rate_adaptive_binning(double p, int n);  // requires n >= 4
double rate_aab(double p, int n);
double rate_af(double p, int n);

// Dispatch on scheme; k is consulted for simple binning only.
double scheme_rate(Scheme scheme, double p, int n, std::optional<int> k = std::nullopt);

// nT/(nT+D) * raw_rate. SB/AB callers pass D = 0: no public channel phase.
double effective_rate(double raw_rate, int n, const TimingParams& timing);

// raw_rate / h(p); defined for p strictly inside (0, 1).
double utilization(double raw_rate, double p);

// Per-frame bit contributions as functions of the photon count.
double aggregated_frame_bits(int n, int photons);  // log2 n - ceil/floor(log2 ...)
double framing_frame_bits(int n, int photons);     // r log2(m+1) + (g-r) log2 m

// Information of the balanced split of n units into g groups (the framing
// optimum): r*log2(m+1) + (g-r)*log2(m) with n = m*g + r.
double balanced_partition_bits(int n, int g);

}  // namespace qkd
