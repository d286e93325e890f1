#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sabc/annealer_flat.hpp"

namespace sabc {

struct RejectionResult {
  std::vector<ParameterPoint> samples;
  std::uint64_t sims = 0;
  double acceptance_rate = 0.0;
  std::string diagnostic;  // non-empty when nothing was accepted
};

/// Plain rejection ABC: keep prior draws whose simulated output lies within
/// `tolerance` of the data. Draw k uses substream k, so runs sharing a seed see
/// the same (theta, x) sequence regardless of tolerance.
RejectionResult rejection_abc(const Model& model, double tolerance, std::size_t n_accept_target,
                              std::uint64_t max_sims, const RngStream& rng);

/// One step of the infinitely-fast-mixing, zero-temperature limit on
/// uniform energies: each u is replaced by a fresh Uniform(0,1) draw if smaller.
void ideal_fast_anneal_step(std::span<double> energies, RngStream& rng);

/// Mean energy after each step (entry 0 is the Uniform(0,1) start).
std::vector<double> ideal_fast_anneal(std::size_t n_particles, std::size_t n_steps, const RngStream& rng);

struct AsymptoticsProbe {
  double slope = 0.0;
  RunResult run;
};

/// Runs the flat annealer and fits the slope of log Te against log sweep over
/// the final decade of sweeps. Throws if the run spans fewer than two decades.
AsymptoticsProbe schedule_asymptotics_probe(ModelPtr model, const RunConfig& config);

/// Slope fit used by the probe, on sweeps in [last / 10, last].
double final_decade_slope(std::span<const double> sweeps, std::span<const double> te);

}  // namespace sabc
