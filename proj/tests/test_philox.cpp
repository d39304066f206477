#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "sop/philox.hpp"

namespace {

using sop::Philox4x32;

// Known-answer vectors of the Random123 reference implementation (kat_vectors, philox4x32 10 rounds).
TEST(Philox, KnownAnswerZero) {
  const auto out = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (Philox4x32::counter_type{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerAllOnes) {
  const auto out = Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (Philox4x32::counter_type{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi) {
  const auto out = Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (Philox4x32::counter_type{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Philox, CompileTimeEvaluable) {
  constexpr auto out = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
  static_assert(out[0] == 0x6627e8d5u);
}

TEST(TrialStream, SlotsAreIndependentOfReadOrder) {
  const sop::TrialStream a(42, 7);
  const sop::TrialStream b(42, 7);
  const double late = a.uniform(9);
  (void)b.uniform(0);
  (void)b.uniform(3);
  EXPECT_EQ(b.uniform(9), late);
}

TEST(TrialStream, DistinctTrialsSeedsAndSlotsDiffer) {
  std::set<double> seen;
  for (std::uint64_t seed : {1ull, 2ull, 1ull << 40}) {
    for (std::uint64_t trial : {0ull, 1ull, 1ull << 33}) {
      for (std::uint32_t slot : {0u, 1u, 2u}) seen.insert(sop::TrialStream(seed, trial).uniform(slot));
    }
  }
  EXPECT_EQ(seen.size(), 27u);
}

TEST(TrialStream, UniformsAreOpenUnitInterval) {
  double lo = 1.0, hi = 0.0, sum = 0.0;
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    const auto u = sop::TrialStream(3, static_cast<std::uint64_t>(i)).uniform_pair(0);
    for (double x : u) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
      sum += x;
    }
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  // Mean of 2n uniforms: sd = 1 / sqrt(12 * 2n).
  EXPECT_NEAR(sum / (2.0 * n), 0.5, 5.0 / std::sqrt(24.0 * n));
}

TEST(TrialStream, ComplexNormalHasRequestedPowerAndUniformPhase) {
  constexpr int n = 200000;
  double power = 0.0;
  double re = 0.0;
  double im = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto h = sop::TrialStream(11, static_cast<std::uint64_t>(i)).complex_normal(2, 3.0);
    power += std::norm(h);
    re += h.real();
    im += h.imag();
  }
  // |h|^2 ~ Exp(3): sd of the mean is 3 / sqrt(n).
  EXPECT_NEAR(power / n, 3.0, 5.0 * 3.0 / std::sqrt(n));
  EXPECT_NEAR(re / n, 0.0, 5.0 * std::sqrt(1.5 / n));
  EXPECT_NEAR(im / n, 0.0, 5.0 * std::sqrt(1.5 / n));
}

}  // namespace
