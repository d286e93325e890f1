#pragma once

#include <functional>
#include <span>
#include <vector>

namespace sabc {

double mean(std::span<const double> xs);
/// Unbiased sample standard deviation.
double stddev(std::span<const double> xs);

/// sup |F_n - F| for a sample against a continuous CDF.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);
/// Two-sample Kolmogorov-Smirnov distance.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Least-squares slope of y on x.
double ls_slope(std::span<const double> x, std::span<const double> y);
/// Least-squares slope of log y on log x; all entries must be positive.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace sabc
