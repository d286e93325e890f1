#pragma once

#include "sabc/annealer_flat.hpp"

namespace sabc {

struct GeneralInit {
  Ensemble ensemble;
  ThermoState state;
  std::vector<Particle> store;  // full prior-predictive sample, energies set
  ModelPtr model;
  std::optional<SummaryMap> summaries;
};

/// Prior-predictive initialization with u1 = raw metric and u2 = -ln f_pri.
/// Starts from 1/T1 = 0, T2 = 1.
GeneralInit init_general(ModelPtr model, const RunConfig& config, const RngStream& rng);

struct CounterForce {
  double inv_te2 = 1.0;
  bool runaway = false;  // 1/T2e would be <= 0; clamped to 1 / kMaxTe2
};

/// Feedback on the prior temperature: 1/T2e - 1 = -a (1/T2 - 1).
CounterForce counter_force(double inv_t2, double a);
inline constexpr double kMaxTe2 = 1e6;

/// T2e for a given T2 (temperatures, not inverses).
double counter_force_T2e(double T2, double a);

struct EntropyRateSolution {
  double f1 = 0.0;
  double inv_te1 = 0.0;
  bool rate_unreachable = false;
};

/// Solves F^T L F = v for F1 given F2, choosing the cooling root ((L F)_1 < 0),
/// and maps it to 1/Te1 = 1/T1 - F1.
EntropyRateSolution solve_constant_entropy_rate(const Matrix2& L, const Vector2& inv_t, double f2, double v);

/// Metropolis step on both energies with inverse environment temperatures.
bool accept_general(double du1, double du2, double inv_te1, double inv_te2, RngStream& rng);

SweepResult sweep_general(Ensemble& ensemble, const Proposal& proposal, const Model& model, double inv_te1,
                          double inv_te2, const RngStream& rng, std::size_t threads = 1);

RunResult run_general(ModelPtr model, const RunConfig& config, const ProgressFn& progress = {});

/// Dispatches on the model's prior: flat annealer unless the prior is informative.
RunResult run_sabc(ModelPtr model, const RunConfig& config, const ProgressFn& progress = {});

}  // namespace sabc
