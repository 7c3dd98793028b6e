#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "rbg/rng.hpp"
#include "rbg/stats.hpp"

using namespace rbg;

// Known-answer vectors from the Random123 distribution (kat_vectors, philox4x32 10 rounds).
TEST(Philox, KnownAnswerZero) {
  const auto out = Philox4x32::apply({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerOnes) {
  const auto out = Philox4x32::apply({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                     {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi) {
  const auto out = Philox4x32::apply({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                     {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Rng, PureFunctionOfInputs) {
  EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
  EXPECT_NE(derive_seed(7, 3), derive_seed(7, 4));
  EXPECT_NE(derive_seed(7, 3), derive_seed(8, 3));
  EXPECT_NE(derive_seed(7, 3, 1), derive_seed(7, 3, 2));
  EXPECT_EQ(pair_uniform(1, StreamTag::bipartite_edge, 4, 9), pair_uniform(1, StreamTag::bipartite_edge, 4, 9));
  EXPECT_NE(pair_uniform(1, StreamTag::bipartite_edge, 4, 9), pair_uniform(1, StreamTag::bipartite_edge, 9, 4));
  EXPECT_NE(pair_uniform(1, StreamTag::bipartite_edge, 4, 9), pair_uniform(1, StreamTag::unipartite_edge, 4, 9));
}

TEST(Rng, UnitRange) {
  EXPECT_EQ(to_unit(0), 0.0);
  EXPECT_LT(to_unit(~std::uint64_t{0}), 1.0);
  CounterEngine e(11, StreamTag::generic);
  for (int i = 0; i < 100000; ++i) {
    const double u = e.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, UniformMoments) {
  CounterEngine e(5, StreamTag::generic);
  RunningStats s;
  const int n = 400000;
  for (int i = 0; i < n; ++i) s.push(e.uniform());
  EXPECT_NEAR(s.mean(), 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(s.variance(), 1.0 / 12.0, 5.0 * std::sqrt(1.0 / 180.0 / n));
}

TEST(Rng, PairUniformsBucketChiSquare) {
  // 100 buckets, 2e5 pair-keyed draws; chi-square with 99 dof has sd ~14.
  std::vector<int> bucket(100, 0);
  int n = 0;
  for (std::uint32_t i = 0; i < 500; ++i)
    for (std::uint32_t j = 0; j < 400; ++j, ++n)
      ++bucket[static_cast<int>(pair_uniform(3, StreamTag::bipartite_edge, i, j) * 100)];
  double chi2 = 0.0;
  const double expected = n / 100.0;
  for (int b : bucket) chi2 += (b - expected) * (b - expected) / expected;
  EXPECT_LT(chi2, 99 + 6 * 14.07);
}

TEST(Rng, DerivedSeedsDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 20000; ++a) seen.insert(derive_seed(42, a));
  EXPECT_EQ(seen.size(), 20000u);
}

TEST(Rng, EngineDeterministic) {
  CounterEngine a(9, StreamTag::bootstrap), b(9, StreamTag::bootstrap), c(9, StreamTag::bootstrap, 1);
  for (int i = 0; i < 1000; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
  }
}
