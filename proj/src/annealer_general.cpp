#include "sabc/annealer_general.hpp"

#include <cmath>

#include "sabc/parallel.hpp"

namespace sabc {

namespace {

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kSweepStream = 2;
constexpr std::uint64_t kOnsagerStream = 3;

}  // namespace

GeneralInit init_general(ModelPtr model, const RunConfig& config, const RngStream& rng) {
  config.validate();
  const std::size_t n = config.n_particles;
  const std::size_t m = config.oversample();
  RngStream init_rng = rng.split(kInitStream);

  GeneralInit init;
  init.store = draw_prior_predictive(*model, m, init_rng.split(0), config.threads);
  init.model = maybe_summarize(std::move(model), config.summaries, init.store, init.summaries);
  for (auto& p : init.store) {
    p.u1 = init.model->distance(p.output);
    p.u2 = prior_energy(*init.model, p.theta);
  }
  RngStream pick = init_rng.split(1);
  init.ensemble.particles = subsample(init.store, n, pick);

  ThermoState& st = init.state;
  st.sims_used = m;
  st.U1 = total_energy(init.ensemble, EnergyKind::u1);
  st.U2 = total_energy(init.ensemble, EnergyKind::u2);
  st.inv_t1 = 0.0;
  st.inv_t2 = 1.0;
  st.inv_te1 = 0.0;
  st.inv_te2 = 1.0;
  return init;
}

CounterForce counter_force(double inv_t2, double a) {
  if (!(inv_t2 > 0.0) || !(a > 0.0)) throw Error("counter_force: need T2 > 0 and a > 0");
  CounterForce cf;
  cf.inv_te2 = 1.0 - a * (inv_t2 - 1.0);
  if (!(cf.inv_te2 > 0.0)) {
    cf.inv_te2 = 1.0 / kMaxTe2;
    cf.runaway = true;
  }
  return cf;
}

double counter_force_T2e(double T2, double a) {
  if (!(T2 > 0.0)) throw Error("counter_force_T2e: T2 must be > 0");
  return 1.0 / counter_force(1.0 / T2, a).inv_te2;
}

EntropyRateSolution solve_constant_entropy_rate(const Matrix2& L, const Vector2& inv_t, double f2, double v) {
  if (!(v >= 0.0)) throw Error("solve_constant_entropy_rate: v must be >= 0");
  const double l11 = L(0, 0);
  const double b = L(0, 1) * f2;           // half the linear coefficient
  const double c = L(1, 1) * f2 * f2 - v;  // constant term
  EntropyRateSolution sol;
  if (!(l11 > 0.0)) {
    // degenerate: 2 b F1 + c = 0
    if (b != 0.0) {
      sol.f1 = -c / (2.0 * b);
      sol.rate_unreachable = !(b < 0.0);  // (L F)_1 = b must be a cooling flux
    } else {
      sol.f1 = 0.0;
      sol.rate_unreachable = true;
    }
  } else {
    const double disc = b * b - l11 * c;
    if (disc < 0.0) {
      // closest approach: vertex of the quadratic, where (L F)_1 = 0
      sol.f1 = -b / l11;
      sol.rate_unreachable = true;
    } else {
      const double root = std::sqrt(disc);
      // cooling root (-b - root) / l11, evaluated without cancellation
      if (b >= 0.0)
        sol.f1 = (-b - root) / l11;
      else
        sol.f1 = c / (-b + root);
    }
  }
  sol.inv_te1 = inv_t[0] - sol.f1;
  return sol;
}

bool accept_general(double du1, double du2, double inv_te1, double inv_te2, RngStream& rng) {
  const double x = -du1 * inv_te1 - du2 * inv_te2;
  if (x >= 0.0) return true;
  return rng.uniform() < std::exp(x);
}

SweepResult sweep_general(Ensemble& ensemble, const Proposal& proposal, const Model& model, double inv_te1,
                          double inv_te2, const RngStream& rng, std::size_t threads) {
  const std::size_t n = ensemble.size();
  std::vector<Vector2> delta(n, Vector2::Zero());
  std::vector<std::uint8_t> accepted(n, 0), simulated(n, 0);
  parallel_for(n, threads, [&](std::size_t i) {
    Particle& p = ensemble.particles[i];
    RngStream r = rng.split(i);
    ParameterPoint theta = proposal.propose(p.theta, r);
    if (!model.in_support(theta)) return;
    OutputPoint x = model.simulate(theta, r);
    simulated[i] = 1;
    const double u1 = model.distance(x);
    const double u2 = prior_energy(model, theta);
    if (accept_general(u1 - p.u1, u2 - p.u2, inv_te1, inv_te2, r)) {
      delta[i] = Vector2(u1 - p.u1, u2 - p.u2);
      p.theta = std::move(theta);
      p.output = std::move(x);
      p.u1 = u1;
      p.u2 = u2;
      accepted[i] = 1;
    }
  });
  SweepResult res;
  for (std::size_t i = 0; i < n; ++i) {
    res.dU += delta[i];
    res.accepted += accepted[i];
    res.sims += simulated[i];
  }
  ++ensemble.sweep_count;
  return res;
}

RunResult run_general(ModelPtr model, const RunConfig& config, const ProgressFn& progress) {
  const RngStream root(config.seed);
  GeneralInit init = init_general(std::move(model), config, root);
  const std::size_t n = config.n_particles;
  const std::size_t n_probe = config.probes();

  RunResult out;
  out.model = init.model;
  out.summaries = init.summaries;
  out.ensemble = std::move(init.ensemble);

  std::unique_ptr<Proposal> proposal = make_proposal(out.ensemble, out.model, config);
  const RngStream sweep_root = root.split(kSweepStream);
  const RngStream onsager_root = root.split(kOnsagerStream);

  ThermoState st = init.state;
  OnsagerMatrix onsager = estimate_onsager(out.ensemble, *proposal, *out.model, st.inv_t1, st.inv_t2, n_probe,
                                           onsager_root.split(0), config.threads);
  st.sims_used += onsager.sims_used;
  st.flags |= kFlagOnsagerUpdated;
  out.trace.push_back(st);
  if (progress) progress(st);

  double f1_prev = 0.0;
  while (true) {
    std::uint32_t flags = kFlagNone;
    if (st.sweep > 0 && st.sweep % config.onsager_period == 0 && st.sims_used + n_probe + n <= config.sim_budget) {
      onsager = estimate_onsager(out.ensemble, *proposal, *out.model, st.inv_t1, st.inv_t2, n_probe,
                                 onsager_root.split(st.sweep), config.threads);
      st.sims_used += onsager.sims_used;
      flags |= kFlagOnsagerUpdated;
    }
    if (st.sweep > 0 && st.sweep % config.recalibration_period == 0) {
      Recalibration rec = recalibrate_temperatures(out.ensemble, init.store, AnnealCase::general, st.inv_t1,
                                                   st.inv_t2);
      if (rec.converged && rec.inv_t2 > 0.0) {
        st.inv_t1 = std::max(0.0, rec.inv_t1);
        st.inv_t2 = rec.inv_t2;
        flags |= kFlagRecalibrated;
      } else {
        flags |= kFlagRecalibrationFailed;
      }
    }

    const CounterForce cf = counter_force(st.inv_t2, config.a);
    if (cf.runaway) flags |= kFlagRunawayT2;
    const double inv_te2 = cf.inv_te2;
    const double f2 = st.inv_t2 - inv_te2;
    EntropyRateSolution sol = solve_constant_entropy_rate(onsager.L, Vector2(st.inv_t1, st.inv_t2), f2, config.v);
    double f1 = sol.f1;
    if (sol.rate_unreachable) {
      flags |= kFlagRateUnreachable;
      if (!(f1 < 0.0)) f1 = f1_prev;
    }
    const double inv_te1 = std::max(0.0, st.inv_t1 - f1);
    f1 = st.inv_t1 - inv_te1;

    if (to_temperature(inv_te1) <= config.te_floor) {
      out.reached_floor = true;
      break;
    }
    if (st.sims_used + n > config.sim_budget) break;

    const Matrix2 cov_before = energy_covariance(out.ensemble);
    SweepResult res = sweep_general(out.ensemble, *proposal, *out.model, inv_te1, inv_te2,
                                    sweep_root.split(st.sweep), config.threads);

    ThermoState next;
    next.sweep = st.sweep + 1;
    next.sims_used = st.sims_used + res.sims;
    next.U1 = total_energy(out.ensemble, EnergyKind::u1);
    next.U2 = total_energy(out.ensemble, EnergyKind::u2);
    next.inv_te1 = inv_te1;
    next.inv_te2 = inv_te2;
    next.acc_rate = static_cast<double>(res.accepted) / static_cast<double>(n);
    const Vector2 force(f1, f2);
    next.sigma_dot = entropy_production_rate(res.dU, force);
    next.sigma_cum = st.sigma_cum + next.sigma_dot;

    Vector2 d_inv_t;
    if (!delta_inverse_temperatures(cov_before, n, res.dU, d_inv_t)) flags |= kFlagSingularJacobian;
    next.inv_t1 = std::max(0.0, st.inv_t1 + d_inv_t[0]);
    next.inv_t2 = st.inv_t2 + d_inv_t[1];
    if (!(next.inv_t2 > 0.0)) next.inv_t2 = st.inv_t2;
    if (next.T2() < 0.5 || next.T2() > 2.0) flags |= kFlagT2OutOfRange;
    next.flags = flags;

    out.trace.push_back(next);
    if (progress) progress(next);
    f1_prev = f1;

    if (config.adapt_covariance && config.proposal == ProposalKind::gaussian) {
      try {
        proposal = make_proposal(out.ensemble, out.model, config);
      } catch (const DegenerateKernelError&) {
      }
    }
    st = next;
  }
  out.sims_used = st.sims_used;
  return out;
}

RunResult run_sabc(ModelPtr model, const RunConfig& config, const ProgressFn& progress) {
  if (model->informative_prior()) return run_general(std::move(model), config, progress);
  return run_flat(std::move(model), config, progress);
}

}  // namespace sabc
