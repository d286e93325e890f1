#pragma once

#include <span>
#include <vector>

#include "sabc/core.hpp"

namespace sabc {

/// (1/alpha) * sum_i |x_i - y_i|^alpha. Throws on dimension mismatch or alpha <= 0.
double rho_power(const OutputPoint& x, const OutputPoint& y, double alpha = 2.0);

/// Empirical prior-predictive CDF of user-metric distances.
///
/// Maps a distance to an energy that is approximately Uniform(0,1) under the
/// prior predictive. With sorted sample d_1..d_M and d_0 = 0, a distance inside
/// (d_k, d_{k+1}) maps to (k + frac)/(M + 1) by linear interpolation; a distance
/// equal to a block of tied sample values maps to their mean rank.
class EnergyTransform {
 public:
  /// Minimum sample size below which `degenerate()` reports true.
  static constexpr std::size_t kMinSamples = 100;

  explicit EnergyTransform(std::vector<double> distances);

  double apply(double rho) const;

  std::span<const double> sorted_distances() const { return sorted_; }
  std::size_t built_from() const { return sorted_.size(); }
  bool degenerate() const { return sorted_.size() < kMinSamples; }

 private:
  std::vector<double> sorted_;
};

EnergyTransform build_energy_transform(std::vector<double> distances);

inline double transform_apply(const EnergyTransform& t, double rho) { return t.apply(rho); }

}  // namespace sabc
