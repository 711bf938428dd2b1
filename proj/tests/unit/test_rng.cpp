#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "mollify/rng.hpp"

using namespace mollify;

// Known-answer vectors published with the Random123 library.
TEST(Philox, KnownAnswerZero) {
  const auto out = philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerOnes) {
  const auto out = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                              {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPi) {
  const auto out = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                              {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out[0], 0xd16cfe09u);
  EXPECT_EQ(out[1], 0x94fdccebu);
  EXPECT_EQ(out[2], 0x5001e420u);
  EXPECT_EQ(out[3], 0x24126ea1u);
}

TEST(CounterRng, SameIdentitySameSequence) {
  CounterRng a(7, StreamTag::Brownian, 3), b(7, StreamTag::Brownian, 3);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(CounterRng, DistinctIdentitiesDiffer) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t seed : {1u, 2u}) {
    for (StreamTag tag : {StreamTag::Coefficient, StreamTag::Brownian, StreamTag::Bridge}) {
      for (std::uint64_t idx : {0u, 1u, 1000000u}) {
        firsts.insert(CounterRng(seed, tag, idx).next_u64());
      }
    }
  }
  EXPECT_EQ(firsts.size(), 18u);
}

TEST(CounterRng, UniformInOpenInterval) {
  CounterRng rng(1, StreamTag::Coefficient, 0);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // Var(U) = 1/12.
  EXPECT_NEAR(sum / n, 0.5, 3.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(CounterRng, NormalMoments) {
  CounterRng rng(11, StreamTag::Brownian, 5);
  const int n = 400000;
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  EXPECT_NEAR(s1 / n, 0.0, 3.0 / std::sqrt(n));
  // Var(Z^2) = 2, Var(Z^4) = 96.
  EXPECT_NEAR(s2 / n, 1.0, 3.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(s4 / n, 3.0, 3.0 * std::sqrt(96.0 / n));
}

TEST(CounterRng, ExponentialMean) {
  CounterRng rng(3, StreamTag::Coefficient, 9);
  const int n = 200000;
  const double rate = 4.0;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rng.exponential(rate);
  EXPECT_NEAR(sum / n, 1.0 / rate, 3.0 * (1.0 / rate) / std::sqrt(n));
  EXPECT_THROW(rng.exponential(0.0), std::invalid_argument);
}
