#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "sabc/core.hpp"
#include "sabc/kernel.hpp"
#include "sabc/metric.hpp"
#include "sabc/sumstats.hpp"
#include "sabc/thermo.hpp"

namespace sabc {

struct SweepResult {
  std::size_t accepted = 0;
  std::uint64_t sims = 0;
  Vector2 dU = Vector2::Zero();
};

using ProgressFn = std::function<void(const ThermoState&)>;

struct RunResult {
  Ensemble ensemble;
  std::vector<ThermoState> trace;
  std::uint64_t sims_used = 0;
  bool reached_floor = false;  // false: stopped by the simulation budget
  ModelPtr model;              // the model actually run (summary-wrapped if applicable)
  std::optional<SummaryMap> summaries;
};

/// Unique Te in (0, sqrt(u_mean)) with (u_mean - Te^2)^2 / (2 Te^3) = v_over_gamma,
/// bisected to full double precision.
double solve_schedule_quartic(double u_mean, double v_over_gamma);

/// Environment temperature for a flat-case ensemble of mean energy `mean_energy` (= T).
/// Feeds the quartic with T^2 so that the schedule matches dU/dt = -gamma (T^2 - Te^2).
double flat_schedule_te(double mean_energy, double v_over_gamma);

/// Metropolis step on the (transformed) distance energy. Te = 0 accepts strict descent only.
bool accept_flat(double u_old, double u_new, double te, RngStream& rng);

struct FlatSchedule {
  double v_over_gamma = 0.5;
  double te_floor = 1e-4;
  double fixed_te = 0.0;

  double next_te(double mean_energy) const {
    return fixed_te > 0.0 ? fixed_te : flat_schedule_te(mean_energy, v_over_gamma);
  }
};

struct FlatInit {
  Ensemble ensemble;
  std::shared_ptr<const EnergyTransform> transform;
  ThermoState state;
  std::vector<Particle> store;
  ModelPtr model;
  std::optional<SummaryMap> summaries;
};

/// Draws the prior-predictive oversample, builds the energy transform from all of
/// it, and keeps n_particles of the pairs as the initial ensemble.
FlatInit init_flat(ModelPtr model, const RunConfig& config, const RngStream& rng);

/// One update attempt per particle. `transform == nullptr` uses the raw metric.
SweepResult sweep_flat(Ensemble& ensemble, const Proposal& proposal, const Model& model,
                       const EnergyTransform* transform, double te, const RngStream& rng,
                       std::size_t threads = 1);

/// The proposal for the current ensemble according to config (Gaussian jump or prior draw).
std::unique_ptr<Proposal> make_proposal(const Ensemble& ensemble, const ModelPtr& model,
                                        const RunConfig& config);

RunResult run_flat(ModelPtr model, const RunConfig& config, const ProgressFn& progress = {});

}  // namespace sabc
