#include "sabc/baselines.hpp"

#include "sabc/stats.hpp"

namespace sabc {

RejectionResult rejection_abc(const Model& model, double tolerance, std::size_t n_accept_target,
                              std::uint64_t max_sims, const RngStream& rng) {
  if (!(tolerance >= 0.0)) throw Error("rejection_abc: tolerance must be >= 0");
  RejectionResult out;
  while (out.samples.size() < n_accept_target && out.sims < max_sims) {
    RngStream r = rng.split(out.sims);
    ParameterPoint theta = model.prior_sample(r);
    OutputPoint x = model.simulate(theta, r);
    ++out.sims;
    if (model.distance(x) <= tolerance) out.samples.push_back(std::move(theta));
  }
  out.acceptance_rate = out.sims ? static_cast<double>(out.samples.size()) / static_cast<double>(out.sims) : 0.0;
  if (out.samples.empty())
    out.diagnostic = "no acceptances after " + std::to_string(out.sims) + " simulations";
  return out;
}

void ideal_fast_anneal_step(std::span<double> energies, RngStream& rng) {
  for (double& u : energies) {
    const double proposal = rng.uniform();
    if (proposal < u) u = proposal;
  }
}

std::vector<double> ideal_fast_anneal(std::size_t n_particles, std::size_t n_steps, const RngStream& rng) {
  if (n_particles == 0) throw Error("ideal_fast_anneal: need at least one particle");
  RngStream r = rng.split(0);
  std::vector<double> u(n_particles);
  for (double& x : u) x = r.uniform();
  std::vector<double> means;
  means.reserve(n_steps + 1);
  means.push_back(mean(u));
  for (std::size_t step = 1; step <= n_steps; ++step) {
    RngStream rs = rng.split(step);
    ideal_fast_anneal_step(u, rs);
    means.push_back(mean(u));
  }
  return means;
}

double final_decade_slope(std::span<const double> sweeps, std::span<const double> te) {
  if (sweeps.size() != te.size() || sweeps.empty()) throw Error("final_decade_slope: bad input");
  const double last = sweeps.back();
  std::vector<double> x, y;
  for (std::size_t i = 0; i < sweeps.size(); ++i) {
    if (sweeps[i] >= last / 10.0 && sweeps[i] > 0.0) {
      x.push_back(sweeps[i]);
      y.push_back(te[i]);
    }
  }
  return loglog_slope(x, y);
}

AsymptoticsProbe schedule_asymptotics_probe(ModelPtr model, const RunConfig& config) {
  AsymptoticsProbe probe;
  probe.run = run_flat(std::move(model), config);
  const auto& trace = probe.run.trace;
  if (trace.size() < 2 || trace.back().sweep < 100)
    throw Error("schedule_asymptotics_probe: trace spans fewer than two decades of sweeps");
  std::vector<double> sweeps, te;
  for (const auto& row : trace) {
    if (row.sweep == 0) continue;
    sweeps.push_back(static_cast<double>(row.sweep));
    te.push_back(row.Te1());
  }
  probe.slope = final_decade_slope(sweeps, te);
  return probe;
}

}  // namespace sabc
