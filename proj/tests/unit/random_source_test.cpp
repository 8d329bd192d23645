#include <gtest/gtest.h>

#include <cmath>

#include "overage/random_source.hpp"

using overage::RandomSource;

namespace {

TEST(RandomSource, ReproducibleStreams) {
  RandomSource a(42, 3);
  RandomSource b(42, 3);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(a.uniform(), b.uniform());
}

TEST(RandomSource, DistinctStreamsDiffer) {
  RandomSource a(42, 0);
  RandomSource b(42, 1);
  RandomSource c(43, 0);
  int same_b = 0;
  int same_c = 0;
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    same_b += u == b.uniform();
    same_c += u == c.uniform();
  }
  EXPECT_EQ(same_b, 0);
  EXPECT_EQ(same_c, 0);
}

TEST(RandomSource, UniformOpenInterval) {
  RandomSource s(1, 0);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(RandomSource, ExponentialMean) {
  RandomSource s(9, 2);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += s.exponential(4.0);
  EXPECT_NEAR(sum / n, 0.25, 5.0 * 0.25 / std::sqrt(n));
}

}  // namespace
