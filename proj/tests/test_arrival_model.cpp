#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "qkd/arrival_model.hpp"
#include "qkd/errors.hpp"
#include "qkd/rng.hpp"

using namespace qkd;

// Golden values frozen from an independent Python implementation of the same
// SplitMix64 scheme; a mismatch means the generator is no longer portable.
TEST_CASE("rng golden sequences") {
  RngStream r(42, 0);
  CHECK(r.next_u64() == 0xbf1a7a1bcf743c4cull);
  CHECK(r.next_u64() == 0x5e3ec8ddd34b1a6aull);
  CHECK(r.next_u64() == 0xec64b2c415827ee9ull);
  CHECK(r.next_u64() == 0x9cc915a0ab30aa6cull);

  RngStream r1(42, 1);
  CHECK(r1.next_u64() == 0x5958f60858572eefull);
  CHECK(r1.next_u64() == 0x2d08eec830bafa62ull);

  RngStream r2(7, 0);
  CHECK(r2.next_u64() == 0x0d0bb4fc21e787fcull);
  CHECK(r2.next_u64() == 0xd4674ca7f417e732ull);

  RngStream d(42, 0);
  CHECK(d.next_double() == doctest::Approx(0.74649775675739327).epsilon(1e-15));
  CHECK(d.next_double() == doctest::Approx(0.36814551749857249).epsilon(1e-15));
  CHECK(d.next_double() == doctest::Approx(0.92341153418738908).epsilon(1e-15));

  RngStream b(42, 0);
  const std::uint32_t expected[] = {4, 2, 1, 4, 1, 3, 4, 1};
  for (std::uint32_t want : expected) {
    CHECK(b.next_below(5) == want);
  }

  RngStream s(42, 0);
  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7};
  s.shuffle(v);
  CHECK(v == std::vector<int>{6, 3, 0, 5, 7, 1, 2, 4});
}

TEST_CASE("rng stream basics") {
  RngStream a(123, 0);
  RngStream b(123, 0);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  RngStream c(123, 1);
  int same = 0;
  RngStream a2(123, 0);
  for (int i = 0; i < 100; ++i) {
    if (a2.next_u64() == c.next_u64()) ++same;
  }
  CHECK(same == 0);
  CHECK_THROWS_AS(a.next_below(0), std::invalid_argument);
  CHECK(RngStream(9, 9).next_below(1) == 0);
}

TEST_CASE("model params validate p") {
  CHECK(ModelParams(0.0).p() == 0.0);
  CHECK(ModelParams(1.0).p() == 1.0);
  CHECK_THROWS_AS(ModelParams(-0.1), std::domain_error);
  CHECK_THROWS_AS(ModelParams(1.5), std::domain_error);
  CHECK_THROWS_AS(ModelParams(std::nan("")), std::domain_error);
}

TEST_CASE("frame validation and accessors") {
  CHECK_THROWS_AS(Frame(10), ConfigError);
  CHECK_THROWS_AS(Frame(1), ConfigError);
  CHECK_THROWS_AS(Frame(0), ConfigError);
  CHECK_THROWS_AS(Frame(-8), ConfigError);

  Frame f(8);
  CHECK(f.length() == 8);
  CHECK(f.photon_count() == 0);
  f.set(3, true);
  f.set(4, true);
  CHECK(f.photon_count() == 2);
  CHECK(f.mask() == 0x18);
  CHECK(Frame::from_mask(8, 0x18) == f);
  CHECK(Frame::from_units(8, {3, 4}) == f);
  CHECK_THROWS_AS(f.set(8, true), ConfigError);
}

TEST_CASE("photon_count examples") {
  CHECK(photon_count(Frame(8)) == 0);
  // occupied units 3 and 4 in 1-indexed terms are 2 and 3 here
  CHECK(photon_count(Frame::from_units(8, {2, 3})) == 2);
  Frame full(16);
  for (int u = 0; u < 16; ++u) full.set(u, true);
  CHECK(photon_count(full) == 16);
}

TEST_CASE("sample_frame degenerate probabilities") {
  RngStream rng(1, 0);
  CHECK(sample_frame(ModelParams(0.0), 8, rng).photon_count() == 0);
  CHECK(sample_frame(ModelParams(1.0), 8, rng).photon_count() == 8);
  CHECK_THROWS_AS(sample_frame(ModelParams(0.5), 10, rng), ConfigError);
}

TEST_CASE("sample_frame golden mask and draw count") {
  RngStream rng(42, 7);
  CHECK(sample_frame(ModelParams(0.5), 8, rng).mask() == 0x11);

  // consumes exactly n draws: a reference stream advanced by n doubles
  // continues in lockstep
  RngStream a(5, 5);
  RngStream b(5, 5);
  (void)sample_frame(ModelParams(0.3), 16, a);
  for (int i = 0; i < 16; ++i) (void)b.next_double();
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("sample_frame matches the binomial mean") {
  RngStream rng(2024, 0);
  const ModelParams params(0.5);
  const int trials = 1000000;
  long long photons = 0;
  for (int t = 0; t < trials; ++t) {
    photons += sample_frame(params, 8, rng).photon_count();
  }
  const double mean = static_cast<double>(photons) / trials;
  const double se = std::sqrt(8 * 0.25 / trials);
  CHECK(std::abs(mean - 4.0) <= 3 * se);
}

TEST_CASE("binary entropy values") {
  CHECK(binary_entropy(0.5) == 1.0);
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  // cross-checked against a 50-digit mpmath evaluation
  CHECK(std::abs(binary_entropy(0.11) - 0.4999159581645280) <= 1e-12);
  CHECK_THROWS_AS(binary_entropy(-0.01), std::domain_error);
  CHECK_THROWS_AS(binary_entropy(1.01), std::domain_error);
}

TEST_CASE("binary entropy symmetry and maximum") {
  double best = 0.0;
  double best_p = 0.0;
  for (int i = 1; i < 1000; ++i) {
    const double p = i / 1000.0;
    CHECK(std::abs(binary_entropy(p) - binary_entropy(1.0 - p)) <= 1e-12);
    if (binary_entropy(p) > best) {
      best = binary_entropy(p);
      best_p = p;
    }
  }
  CHECK(best_p == 0.5);
  CHECK(best == 1.0);
}

TEST_CASE("bin occupancy probabilities") {
  const auto half = bin_occupancy_probs(0.5, 1);
  CHECK(half.occupied == 0.5);
  CHECK(half.empty == 0.5);

  const auto none = bin_occupancy_probs(0.0, 4);
  CHECK(none.occupied == 0.0);
  CHECK(none.empty == 1.0);

  const auto pair = bin_occupancy_probs(0.3, 2);
  CHECK(std::abs(pair.occupied - 0.51) <= 1e-12);
  CHECK(std::abs(pair.empty - 0.49) <= 1e-12);

  CHECK_THROWS_AS(bin_occupancy_probs(0.5, 0), std::domain_error);
  CHECK_THROWS_AS(bin_occupancy_probs(1.5, 2), std::domain_error);

  // complements sum to exactly 1.0 in double arithmetic
  for (int i = 0; i <= 100; ++i) {
    for (int k = 1; k <= 64; k *= 2) {
      const auto probs = bin_occupancy_probs(i / 100.0, k);
      CHECK(probs.occupied + probs.empty == 1.0);
    }
  }
}
