#include "sabc/metric.hpp"

#include <algorithm>
#include <cmath>

namespace sabc {

double rho_power(const OutputPoint& x, const OutputPoint& y, double alpha) {
  if (x.dim() != y.dim()) throw Error("rho_power: dimension mismatch");
  if (!(alpha > 0.0)) throw Error("rho_power: alpha must be positive");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.values.size(); ++i) {
    double d = std::abs(x.values[i] - y.values[i]);
    if (alpha == 1.0)
      sum += d;
    else if (alpha == 2.0)
      sum += d * d;
    else
      sum += std::pow(d, alpha);
  }
  return sum / alpha;
}

EnergyTransform::EnergyTransform(std::vector<double> distances) : sorted_(std::move(distances)) {
  if (sorted_.empty()) throw Error("energy transform: no distances");
  for (double d : sorted_)
    if (!std::isfinite(d) || d < 0.0) throw Error("energy transform: distances must be finite and >= 0");
  std::sort(sorted_.begin(), sorted_.end());
}

double EnergyTransform::apply(double rho) const {
  const double m = static_cast<double>(sorted_.size());
  auto lo = std::lower_bound(sorted_.begin(), sorted_.end(), rho);
  auto hi = std::upper_bound(lo, sorted_.end(), rho);
  const auto k = static_cast<double>(lo - sorted_.begin());
  double u;
  if (hi != lo) {
    const auto ties = static_cast<double>(hi - lo);
    u = (k + (ties + 1.0) / 2.0) / (m + 1.0);
  } else if (lo == sorted_.end()) {
    u = m / (m + 1.0);
  } else {
    double left = (lo == sorted_.begin()) ? 0.0 : *(lo - 1);
    double right = *lo;
    double frac = right > left ? (rho - left) / (right - left) : 0.0;
    u = (k + std::clamp(frac, 0.0, 1.0)) / (m + 1.0);
  }
  return std::clamp(u, 0.0, 1.0);
}

EnergyTransform build_energy_transform(std::vector<double> distances) {
  return EnergyTransform(std::move(distances));
}

}  // namespace sabc
