#include "sabc/core.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "sabc/metric.hpp"
#include "sabc/parallel.hpp"

namespace sabc {

ParameterPoint::ParameterPoint(std::initializer_list<double> c) : coords(c.size()) {
  std::size_t i = 0;
  for (double x : c) coords[i++] = x;
}

OutputPoint::OutputPoint(std::initializer_list<double> v) : values(v.size()) {
  std::size_t i = 0;
  for (double x : v) values[i++] = x;
}

OutputPoint OutputPoint::discrete(std::int64_t count) {
  OutputPoint p;
  p.values = Vector::Constant(1, static_cast<double>(count));
  return p;
}

double Model::distance(const OutputPoint& x) const { return rho_power(x, data(), metric_alpha()); }

double prior_energy(const Model& model, const ParameterPoint& theta) {
  auto lp = model.prior_log_density(theta);
  if (!lp) throw Error("model '" + model.name() + "' has no prior density; u2 unavailable");
  return -*lp;
}

void RunConfig::validate() const {
  std::vector<std::string> problems;
  if (n_particles < 2) problems.emplace_back("n_particles must be >= 2");
  if (sim_budget == 0) problems.emplace_back("sim_budget must be > 0");
  if (!(v > 0.0)) problems.emplace_back("v must be > 0");
  if (!(beta > 0.0)) problems.emplace_back("beta must be > 0");
  if (!(s >= 0.0)) problems.emplace_back("s must be >= 0");
  if (!(a > 0.0)) problems.emplace_back("a must be > 0");
  if (init_oversample != 0 && init_oversample < n_particles)
    problems.emplace_back("init_oversample must be >= n_particles");
  if (recalibration_period == 0) problems.emplace_back("recalibration_period must be >= 1");
  if (onsager_period == 0) problems.emplace_back("onsager_period must be >= 1");
  if (!(te_floor >= 0.0)) problems.emplace_back("te_floor must be >= 0");
  if (!(fixed_te >= 0.0)) problems.emplace_back("fixed_te must be >= 0");
  if (threads == 0) problems.emplace_back("threads must be >= 1");
  if (problems.empty()) return;
  std::ostringstream msg;
  msg << "invalid configuration:";
  for (const auto& p : problems) msg << "\n  " << p;
  throw Error(msg.str());
}

Ensemble recompute_energies(Ensemble ensemble, const Model& model, const EnergyTransform* transform,
                            bool prior_energies) {
  for (auto& p : ensemble.particles) {
    if (p.output.dim() == 0) throw Error("recompute_energies: particle without output");
    double rho = model.distance(p.output);
    p.u1 = transform ? transform->apply(rho) : rho;
    p.u2 = prior_energies ? prior_energy(model, p.theta) : 0.0;
  }
  return ensemble;
}

std::vector<Particle> draw_prior_predictive(const Model& model, std::size_t count, const RngStream& rng,
                                            std::size_t threads) {
  std::vector<Particle> out(count);
  parallel_for(count, threads, [&](std::size_t i) {
    RngStream r = rng.split(i);
    out[i].theta = model.prior_sample(r);
    out[i].output = model.simulate(out[i].theta, r);
  });
  return out;
}

std::vector<Particle> subsample(const std::vector<Particle>& pool, std::size_t n, RngStream& rng) {
  if (n > pool.size()) throw Error("subsample: requested more particles than available");
  if (n == pool.size()) return pool;
  std::vector<std::size_t> idx(pool.size());
  std::iota(idx.begin(), idx.end(), 0);
  // partial Fisher-Yates
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = i + rng.index(pool.size() - i);
    std::swap(idx[i], idx[j]);
  }
  std::vector<Particle> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(pool[idx[i]]);
  return out;
}

}  // namespace sabc
