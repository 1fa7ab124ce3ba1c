#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "vvlab/parallel.hpp"
#include "vvlab/stats.hpp"

using namespace vvlab;

TEST(RunningStats, MergeEqualsSequential) {
  std::mt19937_64 rng(1);
  std::lognormal_distribution<double> dist(0.0, 2.0);
  RunningStats all;
  RunningStats parts[3];
  for (int i = 0; i < 3000; ++i) {
    const double v = dist(rng);
    all.add(v);
    parts[i % 3].add(v);
  }
  RunningStats merged;
  for (const auto& p : parts) merged.merge(p);
  EXPECT_EQ(merged.count(), all.count());
  EXPECT_NEAR(merged.mean(), all.mean(), 1e-12 * all.mean());
  EXPECT_NEAR(merged.variance(), all.variance(), 1e-10 * all.variance());
}

TEST(RunningStats, SmallSampleByHand) {
  RunningStats s;
  for (double v : {1.0, 2.0, 4.0}) s.add(v);
  EXPECT_DOUBLE_EQ(s.mean(), 7.0 / 3.0);
  EXPECT_NEAR(s.variance(), 7.0 / 3.0, 1e-15);  // sample variance
  EXPECT_NEAR(s.standard_error(), std::sqrt(7.0 / 9.0), 1e-15);
}

TEST(ClopperPearson, EdgeCasesHaveClosedForms) {
  const double alpha = 0.05;
  const Interval zero = clopper_pearson(0, 50, 0.95);
  EXPECT_EQ(zero.lower, 0.0);
  EXPECT_NEAR(zero.upper, 1.0 - std::pow(alpha / 2.0, 1.0 / 50.0), 1e-12);
  const Interval all = clopper_pearson(50, 50, 0.95);
  EXPECT_EQ(all.upper, 1.0);
  EXPECT_NEAR(all.lower, std::pow(alpha / 2.0, 1.0 / 50.0), 1e-12);
}

TEST(ClopperPearson, TabulatedValue) {
  const Interval ci = clopper_pearson(5, 10, 0.95);
  EXPECT_NEAR(ci.lower, 0.18708602, 1e-7);
  EXPECT_NEAR(ci.upper, 0.81291398, 1e-7);
}

TEST(ClopperPearson, CoversPointEstimate) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t n = 1 + rng() % 5000;
    const std::uint64_t k = rng() % (n + 1);
    const Interval ci = clopper_pearson(k, n, 0.95);
    const double p = static_cast<double>(k) / static_cast<double>(n);
    EXPECT_LE(ci.lower, p);
    EXPECT_GE(ci.upper, p);
  }
}

TEST(NormalInterval, SymmetricAroundMean) {
  const Interval ci = normal_interval(1.0, 0.1, 0.95);
  EXPECT_NEAR(ci.lower, 1.0 - 0.1959963984540054, 1e-12);
  EXPECT_NEAR(ci.upper, 1.0 + 0.1959963984540054, 1e-12);
  EXPECT_TRUE(intervals_overlap(ci, {1.19, 2.0}));
  EXPECT_FALSE(intervals_overlap(ci, {1.2, 2.0}));
}

TEST(Parallel, SharesSumToTotal) {
  for (std::uint64_t n : {0, 1, 63, 64, 65, 100000}) {
    std::uint64_t total = 0;
    for (std::uint64_t k = 0; k < 64; ++k) total += substream_share(n, 64, k);
    EXPECT_EQ(total, n);
  }
}

TEST(Parallel, ResultsIndependentOfThreadCount) {
  auto square = [](std::size_t k) { return static_cast<double>(k * k); };
  EXPECT_EQ(run_indexed<double>(37, 1, square), run_indexed<double>(37, 5, square));
}
