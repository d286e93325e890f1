#include "sabc/annealer_flat.hpp"

#include <cmath>

#include "sabc/parallel.hpp"

namespace sabc {

namespace {

// Stream tags under the run seed.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kSweepStream = 2;

}  // namespace

double solve_schedule_quartic(double u_mean, double v_over_gamma) {
  if (!(u_mean > 0.0) || !std::isfinite(u_mean)) throw Error("solve_schedule_quartic: U_mean must be > 0");
  if (!(v_over_gamma > 0.0) || !std::isfinite(v_over_gamma))
    throw Error("solve_schedule_quartic: v must be > 0");
  auto residual = [&](double te) {
    double gap = u_mean - te * te;
    return gap * gap / (2.0 * te * te * te) - v_over_gamma;
  };
  double lo = 0.0, hi = std::sqrt(u_mean);
  // residual > 0 on (0, root), < 0 on (root, sqrt(U))
  for (int it = 0; it < 2000; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double g = (u_mean - mid * mid) * (u_mean - mid * mid) - 2.0 * v_over_gamma * mid * mid * mid;
    if (g > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  if (lo <= 0.0) return hi;
  if (hi >= std::sqrt(u_mean)) return lo;
  return std::abs(residual(lo)) <= std::abs(residual(hi)) ? lo : hi;
}

double flat_schedule_te(double mean_energy, double v_over_gamma) {
  return solve_schedule_quartic(mean_energy * mean_energy, v_over_gamma);
}

bool accept_flat(double u_old, double u_new, double te, RngStream& rng) {
  const double du = u_new - u_old;
  if (te <= 0.0) return du < 0.0;
  const double x = -du / te;
  if (x >= 0.0) return true;
  return rng.uniform() < std::exp(x);
}

FlatInit init_flat(ModelPtr model, const RunConfig& config, const RngStream& rng) {
  config.validate();
  const std::size_t n = config.n_particles;
  const std::size_t m = config.oversample();
  if (m < n) throw Error("init_flat: init_oversample must be >= n_particles");
  RngStream init_rng = rng.split(kInitStream);

  FlatInit init;
  init.store = draw_prior_predictive(*model, m, init_rng.split(0), config.threads);
  init.model = maybe_summarize(std::move(model), config.summaries, init.store, init.summaries);

  std::vector<double> distances(m);
  for (std::size_t i = 0; i < m; ++i) distances[i] = init.model->distance(init.store[i].output);
  init.transform = std::make_shared<const EnergyTransform>(std::move(distances));
  for (auto& p : init.store) p.u1 = init.transform->apply(init.model->distance(p.output));

  RngStream pick = init_rng.split(1);
  init.ensemble.particles = subsample(init.store, n, pick);

  ThermoState& st = init.state;
  st.sims_used = m;
  st.U1 = total_energy(init.ensemble, EnergyKind::u1);
  double t1 = temperature_from_energy(st.U1, n);
  st.inv_t1 = t1 > 0.0 ? 1.0 / t1 : std::numeric_limits<double>::infinity();
  FlatSchedule sched{config.v, config.te_floor, config.fixed_te};
  st.inv_te1 = t1 > 0.0 ? 1.0 / sched.next_te(t1) : std::numeric_limits<double>::infinity();
  return init;
}

SweepResult sweep_flat(Ensemble& ensemble, const Proposal& proposal, const Model& model,
                       const EnergyTransform* transform, double te, const RngStream& rng,
                       std::size_t threads) {
  const std::size_t n = ensemble.size();
  std::vector<double> delta(n, 0.0);
  std::vector<std::uint8_t> accepted(n, 0), simulated(n, 0);
  parallel_for(n, threads, [&](std::size_t i) {
    Particle& p = ensemble.particles[i];
    RngStream r = rng.split(i);
    ParameterPoint theta = proposal.propose(p.theta, r);
    if (!model.in_support(theta)) return;
    OutputPoint x = model.simulate(theta, r);
    simulated[i] = 1;
    double rho = model.distance(x);
    double u = transform ? transform->apply(rho) : rho;
    if (accept_flat(p.u1, u, te, r)) {
      delta[i] = u - p.u1;
      p.theta = std::move(theta);
      p.output = std::move(x);
      p.u1 = u;
      accepted[i] = 1;
    }
  });
  SweepResult res;
  for (std::size_t i = 0; i < n; ++i) {
    res.dU[0] += delta[i];
    res.accepted += accepted[i];
    res.sims += simulated[i];
  }
  ++ensemble.sweep_count;
  return res;
}

std::unique_ptr<Proposal> make_proposal(const Ensemble& ensemble, const ModelPtr& model,
                                        const RunConfig& config) {
  if (config.proposal == ProposalKind::prior)
    return std::make_unique<IndependentProposal>([model](RngStream& r) { return model->prior_sample(r); });
  return std::make_unique<GaussianProposal>(build_kernel(ensemble_covariance(ensemble), config.beta, config.s));
}

RunResult run_flat(ModelPtr model, const RunConfig& config, const ProgressFn& progress) {
  const RngStream root(config.seed);
  FlatInit init = init_flat(std::move(model), config, root);
  const std::size_t n = config.n_particles;
  const FlatSchedule sched{config.v, config.te_floor, config.fixed_te};

  RunResult out;
  out.model = init.model;
  out.summaries = init.summaries;
  out.ensemble = std::move(init.ensemble);
  out.trace.push_back(init.state);
  if (progress) progress(init.state);

  std::unique_ptr<Proposal> proposal = make_proposal(out.ensemble, out.model, config);
  const RngStream sweep_root = root.split(kSweepStream);

  ThermoState st = init.state;
  while (true) {
    if (st.Te1() <= sched.te_floor) {
      out.reached_floor = true;
      break;
    }
    if (st.sims_used + n > config.sim_budget) break;

    const double t1 = st.T1();
    const double te = st.Te1();
    SweepResult res = sweep_flat(out.ensemble, *proposal, *out.model, init.transform.get(), te,
                                 sweep_root.split(st.sweep), config.threads);

    ThermoState next;
    next.sweep = st.sweep + 1;
    next.sims_used = st.sims_used + res.sims;
    next.U1 = total_energy(out.ensemble, EnergyKind::u1);
    next.inv_te1 = st.inv_te1;
    next.acc_rate = static_cast<double>(res.accepted) / static_cast<double>(n);
    next.sigma_dot = res.dU[0] * (1.0 / t1 - 1.0 / te);
    next.sigma_cum = st.sigma_cum + next.sigma_dot;
    const double t1_new = temperature_from_energy(next.U1, n);
    next.inv_t1 = t1_new > 0.0 ? 1.0 / t1_new : std::numeric_limits<double>::infinity();
    out.trace.push_back(next);
    if (progress) progress(next);

    if (config.adapt_covariance && config.proposal == ProposalKind::gaussian) {
      try {
        proposal = make_proposal(out.ensemble, out.model, config);
      } catch (const DegenerateKernelError&) {
        // keep the previous kernel
      }
    }
    // environment temperature for the next sweep
    st = next;
    st.inv_te1 = t1_new > 0.0 ? 1.0 / sched.next_te(t1_new) : std::numeric_limits<double>::infinity();
  }
  out.sims_used = st.sims_used;
  return out;
}

}  // namespace sabc
