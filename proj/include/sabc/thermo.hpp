#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sabc/core.hpp"
#include "sabc/kernel.hpp"

namespace sabc {

using Matrix2 = Eigen::Matrix2d;
using Vector2 = Eigen::Vector2d;

/// Trace flags; a row may carry several.
enum TraceFlag : std::uint32_t {
  kFlagNone = 0,
  kFlagRateUnreachable = 1u << 0,
  kFlagRunawayT2 = 1u << 1,
  kFlagRecalibrationFailed = 1u << 2,
  kFlagSingularJacobian = 1u << 3,
  kFlagT2OutOfRange = 1u << 4,
  kFlagRecalibrated = 1u << 5,
  kFlagOnsagerUpdated = 1u << 6,
};

std::string describe_flags(std::uint32_t flags);

inline double to_temperature(double inverse) {
  return inverse > 0.0 ? 1.0 / inverse : std::numeric_limits<double>::infinity();
}

/// One trace row. Temperatures are stored as inverses so that the prior state
/// 1/T1 = 0 is representable.
struct ThermoState {
  std::size_t sweep = 0;
  std::uint64_t sims_used = 0;
  double U1 = 0.0;
  double U2 = 0.0;
  double inv_t1 = 0.0;
  double inv_t2 = 1.0;
  double inv_te1 = 0.0;
  double inv_te2 = 1.0;
  double acc_rate = 0.0;
  double sigma_dot = 0.0;
  double sigma_cum = 0.0;
  std::uint32_t flags = kFlagNone;

  double T1() const { return to_temperature(inv_t1); }
  double T2() const { return to_temperature(inv_t2); }
  double Te1() const { return to_temperature(inv_te1); }
  double Te2() const { return to_temperature(inv_te2); }
};

enum class EnergyKind { u1, u2 };

double total_energy(const Ensemble& ensemble, EnergyKind which);

/// Flat-case U = N T (unit specific heat of the transformed energy).
double temperature_from_energy(double U, std::size_t n);

/// sum_j dU_j (1/T_j - 1/Te_j). Throws on nonpositive temperatures.
double entropy_production_rate(std::span<const double> dU, std::span<const double> T,
                               std::span<const double> Te);
/// Same, with the forces F_j = 1/T_j - 1/Te_j already formed.
double entropy_production_rate(const Vector2& dU, const Vector2& force);

struct JacobianEstimate {
  Matrix2 value;
  bool degenerate = false;  // some energy has zero variance across the ensemble
};

/// dU/dT = N [[Var u1 / T1^2, Cov / T2^2], [Cov / T1^2, Var u2 / T2^2]].
JacobianEstimate jacobian_U_T(const Ensemble& ensemble, double T1, double T2);

class RecalibrationNeeded : public Error {
 public:
  using Error::Error;
};

/// Solves jac * dT = dU; throws RecalibrationNeeded when jac is singular or
/// its condition number exceeds `max_condition`.
Vector2 delta_temperatures(const Matrix2& jac, const Vector2& dU, double max_condition = 1e12);

/// Unbiased sample covariance of (u1, u2) across the ensemble.
Matrix2 energy_covariance(const Ensemble& ensemble);

/// Inverse-temperature form of the same linear response: d(1/T) = -(N C)^+ dU,
/// where C is the ensemble energy covariance. Directions with vanishing variance
/// are left unchanged. Returns false unless C has full rank.
bool delta_inverse_temperatures(const Matrix2& energy_cov, std::size_t n, const Vector2& dU, Vector2& d_inv_t);

struct OnsagerMatrix {
  Matrix2 L = Matrix2::Zero();
  Matrix2 standard_error = Matrix2::Zero();
  std::uint64_t sims_used = 0;
  std::size_t n_probe = 0;
};

/// Outer-product estimator of the Onsager matrix from `n_probe` measurement
/// moves: each picks a particle uniformly, proposes, simulates, and adds
/// w * du du^T with w = min(1, exp(-du1/T1 - du2/T2)). The ensemble is not modified.
OnsagerMatrix estimate_onsager(const Ensemble& ensemble, const Proposal& proposal, const Model& model,
                               double inv_t1, double inv_t2, std::size_t n_probe, const RngStream& rng,
                               std::size_t threads = 1);

/// Accumulates one probe contribution; exposed for exact enumeration oracles.
Matrix2 onsager_summand(const Vector2& du, double inv_t1, double inv_t2);

struct Recalibration {
  double inv_t1 = 0.0;
  double inv_t2 = 1.0;
  bool converged = false;
  std::size_t iterations = 0;
};

/// Finds (1/T1, 1/T2) such that the prior-predictive store, reweighted by
/// exp(-u1/T1 - u2 (1/T2 - 1)), reproduces the target mean energies.
Recalibration recalibrate_general(const Vector2& target_mean, const std::vector<Particle>& store,
                                  double inv_t1_guess, double inv_t2_guess, double rel_tol = 1e-6,
                                  std::size_t max_iter = 200);

enum class AnnealCase { flat, general };

Recalibration recalibrate_temperatures(const Ensemble& ensemble, const std::vector<Particle>& store,
                                       AnnealCase which, double inv_t1_guess = 0.0, double inv_t2_guess = 1.0);

}  // namespace sabc
