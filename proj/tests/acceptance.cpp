// Acceptance suite: one test case per release criterion, each printing a
// [PASS]/[FAIL] line so the gate can be read off the log directly.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include "qkd/arrival_model.hpp"
#include "qkd/binning.hpp"
#include "qkd/oracle.hpp"
#include "qkd/rates.hpp"
#include "qkd/session.hpp"

using namespace qkd;

namespace {

struct Stopwatch {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void report(bool pass, const char* what, const std::string& detail) {
  std::printf("[%s] %s%s%s\n", pass ? "PASS" : "FAIL", what, detail.empty() ? "" : ": ",
              detail.c_str());
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

const std::vector<Scheme> kAllSchemes{Scheme::SimpleBinning, Scheme::AdaptiveBinning,
                                      Scheme::AdaptiveAggregated, Scheme::AdaptiveFraming};

}  // namespace

TEST_CASE("criterion 1: closed forms match exhaustive enumeration") {
  Stopwatch clock;
  double worst = 0.0;
  for (int n : {4, 8, 16}) {
    struct Check {
      Scheme scheme;
      std::optional<int> k;
    };
    std::vector<Check> checks;
    for (int k = 1; k <= n; k *= 2) checks.push_back({Scheme::SimpleBinning, k});
    checks.push_back({Scheme::AdaptiveBinning, std::nullopt});
    checks.push_back({Scheme::AdaptiveAggregated, std::nullopt});
    checks.push_back({Scheme::AdaptiveFraming, std::nullopt});
    for (const auto& check : checks) {
      const EnumerationProfile prof = enumerate_profile(check.scheme, n, check.k);
      for (int i = 1; i <= 19; ++i) {
        const double p = i * 0.05;
        const double analytic = scheme_rate(check.scheme, p, n, check.k);
        worst = std::max(worst, std::abs(analytic - prof.rate(p)));
      }
    }
  }
  const double elapsed = clock.seconds();
  const bool pass = worst <= 1e-10 && elapsed < 30.0;
  report(pass, "criterion 1 formula/enumeration equivalence",
         fmt("max |diff| %.3g over n in {4,8,16}, %.1f s", worst, elapsed));
  CHECK(worst <= 1e-10);
  CHECK(elapsed < 30.0);
}

TEST_CASE("criterion 2: entropy bound caps every rate") {
  bool bounded = true;
  bool strict = true;
  for (int n : {8, 16, 64}) {
    for (int i = 1; i <= 99; ++i) {
      const double p = i / 100.0;
      const double h = binary_entropy(p);
      for (int k : {1, 2, 4}) {
        const double sb = rate_simple_binning(p, n, k);
        bounded = bounded && sb <= h + 1e-12;
        strict = strict && (h - sb > 1e-9);
      }
      const double ab = rate_adaptive_binning(p, n);
      bounded = bounded && ab <= h + 1e-12;
      strict = strict && (h - ab > 1e-9);
      bounded = bounded && rate_aab(p, n) <= h + 1e-12;
      bounded = bounded && rate_af(p, n) <= h + 1e-12;
    }
  }
  report(bounded && strict, "criterion 2 entropy bound",
         std::string("all rates <= h(p); SB/AB strictly below at interior p"));
  CHECK(bounded);
  CHECK(strict);
}

TEST_CASE("criterion 3: five-frame worked example") {
  // 1-indexed narrative units shifted to 0-indexed masks
  const std::vector<Frame> frames{
      Frame::from_units(8, {0}),          // one photon at unit 1
      Frame::from_units(8, {2, 3}),       // units 3,4
      Frame(8),                           // empty
      Frame::from_units(8, {3, 4}),       // units 4,5
      Frame::from_units(8, {0, 2, 3, 6})  // units 1,3,4,7
  };
  const std::vector<std::vector<double>> expected{
      {2, 2, 0, 0, 2},  // SB k=2
      {3, 0, 0, 0, 0},  // SB k=1
      {3, 2, 0, 0, 2},  // AB
      {3, 2, 0, 2, 1},  // AAB
      {3, 4, 0, 4, 4},  // AF
  };

  bool pass = true;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Frame& f = frames[i];
    RngStream rng(1, i);
    const auto sb2 = simple_binning_encode(f, 2);
    const auto sb1 = simple_binning_encode(f, 1);
    const auto ab = adaptive_binning_encode(f);
    const auto aab = aab_encode(f, rng);
    const auto af = af_encode(f, rng);
    const double got[5] = {sb2 ? sb2->bit_count() : 0.0, sb1 ? sb1->bit_count() : 0.0,
                           ab ? ab->bit_count() : 0.0, aab ? aab->key.bit_count() : 0.0,
                           af ? af->key.bit_count() : 0.0};
    for (int s = 0; s < 5; ++s) {
      if (got[s] != expected[static_cast<std::size_t>(s)][i]) pass = false;
      CHECK(got[s] == expected[static_cast<std::size_t>(s)][i]);
    }
  }
  report(pass, "criterion 3 five-frame example",
         "per-frame bits SB(k=2)/SB(k=1)/AB/AAB/AF as narrated");
}

TEST_CASE("criterion 4: SB n=64 k=1 utilization maximum near one half") {
  // The peak sits near p ~ 2.2e-3, so the sweep must reach well below 0.01:
  // geometric grid from 1e-4 to 0.5 (utilization is symmetric in p <-> 1-p).
  double best = 0.0;
  double best_p = 0.0;
  for (double p = 1e-4; p < 0.5; p *= 1.02) {
    const double u = utilization(rate_simple_binning(p, 64, 1), p);
    if (u > best) {
      best = u;
      best_p = p;
    }
  }
  const bool pass = best >= 0.45 && best <= 0.55;
  report(pass, "criterion 4 peak utilization of SB n=64 k=1",
         fmt("max %.4f at p = %.3g (band [0.45, 0.55])", best, best_p));
  CHECK(best >= 0.45);
  CHECK(best <= 0.55);
}

TEST_CASE("criterion 5a: framing dominates every other scheme") {
  bool pass = true;
  for (int n : {8, 16, 64}) {
    for (int i = 1; i <= 99; ++i) {
      const double p = i / 100.0;
      const double af = rate_af(p, n);
      pass = pass && af + 1e-12 >= rate_aab(p, n);
      pass = pass && af + 1e-12 >= rate_adaptive_binning(p, n);
      pass = pass && af + 1e-12 >= rate_simple_binning(p, n, 1);
    }
  }
  report(pass, "criterion 5a scheme ordering",
         "AF >= AAB, AB, SB(k=1) at every grid point, n in {8,16,64}");
  CHECK(pass);
}

TEST_CASE("criterion 5b: rate agreement at the stated grid edges") {
  // As stated: all four rates within 2% relative at p = 0.01 and p = 0.99
  // for n = 64. The closed forms themselves put the spread at ~41% there
  // (framing keeps collecting multi-photon frames that simple binning
  // drops), so this check documents a real gap: the four curves only close
  // to within 2% once p drops below ~3e-4 (or rises above 1-3e-4), which is
  // what the diagnostic line shows.
  auto spread_at = [](double p) {
    const double rates[4] = {rate_simple_binning(p, 64, 1), rate_adaptive_binning(p, 64),
                             rate_aab(p, 64), rate_af(p, 64)};
    double lo = rates[0];
    double hi = rates[0];
    for (double r : rates) {
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    return (hi - lo) / hi;
  };

  const double at_low = spread_at(0.01);
  const double at_high = spread_at(0.99);
  const bool stated = at_low <= 0.02 && at_high <= 0.02;
  report(stated, "criterion 5b rate agreement at p = 0.01 / 0.99, n=64",
         fmt("spread %.1f%% / %.1f%% vs the 2%% gate", 100 * at_low, 100 * at_high));
  std::printf("       diagnostic: spread %.2f%% at p = 1e-4 and %.2f%% at p = 1-1e-4 "
              "(the curves do converge at the occupancy extremes)\n",
              100 * spread_at(1e-4), 100 * spread_at(1.0 - 1e-4));
  CHECK(at_low <= 0.02);
  CHECK(at_high <= 0.02);
}

TEST_CASE("criterion 6: balanced partitions maximize extracted bits") {
  Stopwatch clock;
  std::uint64_t cases = 0;
  bool bound_ok = true;
  bool equality_ok = true;

  std::vector<int> sizes;
  for (int n = 1; n <= 12; ++n) {
    for (int g = 1; g <= n; ++g) {
      const int m = n / g;
      sizes.assign(static_cast<std::size_t>(g), 0);
      const std::function<void(int, int)> rec = [&](int slot, int left) {
        if (slot == g - 1) {
          sizes[static_cast<std::size_t>(slot)] = left;
          ++cases;
          if (!partition_bound_check(n, g, sizes)) bound_ok = false;
          double lhs = 0.0;
          for (int d : sizes) lhs += std::log2(static_cast<double>(d));
          const bool balanced = std::all_of(sizes.begin(), sizes.end(),
                                            [&](int d) { return d == m || d == m + 1; });
          if (balanced != (std::abs(lhs - balanced_partition_bits(n, g)) <= 1e-9)) {
            equality_ok = false;
          }
          return;
        }
        for (int d = 1; d <= left - (g - slot - 1); ++d) {
          sizes[static_cast<std::size_t>(slot)] = d;
          rec(slot + 1, left - d);
        }
      };
      rec(0, n);
    }
  }
  const double elapsed = clock.seconds();
  const bool pass = bound_ok && equality_ok && elapsed < 60.0;
  report(pass, "criterion 6 partition bound",
         fmt("%.0f compositions (n <= 12), equality iff balanced, %.2f s",
             static_cast<double>(cases), elapsed));
  CHECK(bound_ok);
  CHECK(equality_ok);
  CHECK(elapsed < 60.0);
}

TEST_CASE("criterion 7: million-trial Monte Carlo stays within 5 sigma") {
  struct Config {
    Scheme scheme;
    std::optional<int> k;
  };
  // SB exercised at both closed-form branches
  const std::vector<Config> configs{{Scheme::SimpleBinning, 1},
                                    {Scheme::SimpleBinning, 2},
                                    {Scheme::AdaptiveBinning, std::nullopt},
                                    {Scheme::AdaptiveAggregated, std::nullopt},
                                    {Scheme::AdaptiveFraming, std::nullopt}};
  bool pass = true;
  double worst_z = 0.0;
  std::uint64_t seed = 1000;
  for (const auto& config : configs) {
    for (double p : {0.1, 0.5, 0.9}) {
      const auto mc = monte_carlo_rate(config.scheme, p, 8, config.k, 1000000, seed++);
      const double analytic = scheme_rate(config.scheme, p, 8, config.k);
      double z = 0.0;
      if (mc.standard_error > 0.0) {
        z = (mc.mean_bits_per_unit - analytic) / mc.standard_error;
      } else if (mc.mean_bits_per_unit != analytic) {
        z = 1e9;
      }
      worst_z = std::max(worst_z, std::abs(z));
      if (std::abs(z) > 5.0) pass = false;
      CHECK(std::abs(z) <= 5.0);
    }
  }
  report(pass, "criterion 7 Monte Carlo consistency",
         fmt("worst |z| = %.2f over 5 encoder configs x p in {0.1,0.5,0.9}", worst_z));
}

TEST_CASE("criterion 8: exhaustive protocol round-trip") {
  bool agree = true;
  bool wire_ok = true;
  std::uint64_t checked = 0;

  for (std::uint32_t mask = 0; mask < 256; ++mask) {
    const Frame frame = Frame::from_mask(8, mask);

    // deterministic schemes: Bob recomputes with the same rule
    for (int k = 1; k <= 8; k *= 2) {
      agree = agree && simple_binning_encode(frame, k) == simple_binning_encode(frame, k);
    }
    agree = agree && adaptive_binning_encode(frame) == adaptive_binning_encode(frame);

    for (std::uint64_t s = 0; s < 100; ++s) {
      RngStream rng(s, mask);
      for (Scheme scheme : {Scheme::AdaptiveAggregated, Scheme::AdaptiveFraming}) {
        auto enc = scheme == Scheme::AdaptiveAggregated ? aab_encode(frame, rng)
                                                        : af_encode(frame, rng);
        if (!enc) continue;
        enc->message.frame_index = checked;
        const auto wire = serialize_message(enc->message);
        const AssignmentMessage back = deserialize_message(wire);
        wire_ok = wire_ok && back == enc->message && serialize_message(back) == wire;
        const auto bob = decode_with_assignment(frame, back);
        agree = agree && bob.has_value() && *bob == enc->key;
        ++checked;
      }
    }
  }
  report(agree && wire_ok, "criterion 8 protocol round-trip",
         fmt("%.0f AAB/AF encodings over all 256 frames x 100 seeds, zero mismatches",
             static_cast<double>(checked)));
  CHECK(agree);
  CHECK(wire_ok);
}

TEST_CASE("criterion 9: effective-rate arithmetic") {
  // nT = 64 * 10 ps equals D = 640 ps, halving the rate exactly
  const double raw = rate_af(0.2, 64);
  const double eff = effective_rate(raw, 64, {10e-12, 640e-12});
  const bool halves = eff == raw / 2;

  bool sb_ab_unchanged = true;
  for (double d : {0.0, 1e-12, 640e-12, 1e-6}) {
    // SB/AB never enter a communication phase; callers pass D = 0
    (void)d;
    const double sb = rate_simple_binning(0.3, 64, 2);
    sb_ab_unchanged = sb_ab_unchanged && effective_rate(sb, 64, {10e-12, 0.0}) == sb;
    const double ab = rate_adaptive_binning(0.3, 64);
    sb_ab_unchanged = sb_ab_unchanged && effective_rate(ab, 64, {10e-12, 0.0}) == ab;
  }
  report(halves && sb_ab_unchanged, "criterion 9 effective rates",
         "nT = D halves AAB/AF exactly; SB/AB rates unchanged");
  CHECK(halves);
  CHECK(sb_ab_unchanged);
}
