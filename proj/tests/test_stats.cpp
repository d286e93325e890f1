#include <gtest/gtest.h>

#include <cmath>

#include "sabc/core.hpp"
#include "sabc/stats.hpp"

using namespace sabc;

TEST(Stats, MeanAndStddev) {
  std::vector<double> x{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(mean(x), 2.5);
  EXPECT_DOUBLE_EQ(stddev(x), std::sqrt(5.0 / 3.0));
}

TEST(Stats, KsAgainstQuantileGrid) {
  const int n = 100;
  std::vector<double> x;
  for (int i = 0; i < n; ++i) x.push_back((i + 0.5) / n);
  EXPECT_NEAR(ks_statistic(x, [](double t) { return t; }), 0.5 / n, 1e-12);
}

TEST(Stats, KsTwoSample) {
  std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  EXPECT_DOUBLE_EQ(ks_two_sample(a, a), 0.0);
  EXPECT_DOUBLE_EQ(ks_two_sample(a, b), 1.0);
}

TEST(Stats, Slopes) {
  std::vector<double> x{1, 2, 4, 8}, y{3, 5, 9, 17};
  EXPECT_NEAR(ls_slope(x, y), 2.0, 1e-12);
  std::vector<double> q;
  for (double t : x) q.push_back(7.0 * std::pow(t, -2.0));
  EXPECT_NEAR(loglog_slope(x, q), -2.0, 1e-12);
}

TEST(Stats, LogSlopeNeedsPositiveValues) {
  std::vector<double> x{1, 2}, y{1, 0};
  EXPECT_THROW(loglog_slope(x, y), Error);
}
