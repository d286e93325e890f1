#include "sabc/thermo.hpp"

#include <cmath>
#include <sstream>

#include "sabc/parallel.hpp"

namespace sabc {

std::string describe_flags(std::uint32_t flags) {
  static const std::pair<std::uint32_t, const char*> names[] = {
      {kFlagRateUnreachable, "rate_unreachable"}, {kFlagRunawayT2, "runaway_t2"},
      {kFlagRecalibrationFailed, "recalibration_failed"}, {kFlagSingularJacobian, "singular_jacobian"},
      {kFlagT2OutOfRange, "t2_out_of_range"}, {kFlagRecalibrated, "recalibrated"},
      {kFlagOnsagerUpdated, "onsager_updated"},
  };
  std::string out;
  for (auto [bit, name] : names) {
    if (!(flags & bit)) continue;
    if (!out.empty()) out += '|';
    out += name;
  }
  return out;
}

double total_energy(const Ensemble& ensemble, EnergyKind which) {
  double sum = 0.0;
  for (const auto& p : ensemble.particles) sum += which == EnergyKind::u1 ? p.u1 : p.u2;
  return sum;
}

double temperature_from_energy(double U, std::size_t n) {
  if (n == 0) throw Error("temperature_from_energy: N must be >= 1");
  return U / static_cast<double>(n);
}

double entropy_production_rate(std::span<const double> dU, std::span<const double> T,
                               std::span<const double> Te) {
  if (dU.size() != T.size() || dU.size() != Te.size())
    throw Error("entropy_production_rate: length mismatch");
  double rate = 0.0;
  for (std::size_t j = 0; j < dU.size(); ++j) {
    if (!(T[j] > 0.0) || !(Te[j] > 0.0)) throw Error("entropy_production_rate: temperatures must be positive");
    rate += dU[j] * (1.0 / T[j] - 1.0 / Te[j]);
  }
  return rate;
}

double entropy_production_rate(const Vector2& dU, const Vector2& force) { return dU.dot(force); }

namespace {

struct Moments {
  double mean1 = 0, mean2 = 0, var1 = 0, var2 = 0, cov = 0;
};

Moments energy_moments(const Ensemble& ensemble) {
  const std::size_t n = ensemble.size();
  if (n < 2) throw Error("energy moments: need at least two particles");
  Moments m;
  for (const auto& p : ensemble.particles) {
    m.mean1 += p.u1;
    m.mean2 += p.u2;
  }
  m.mean1 /= static_cast<double>(n);
  m.mean2 /= static_cast<double>(n);
  for (const auto& p : ensemble.particles) {
    double a = p.u1 - m.mean1, b = p.u2 - m.mean2;
    m.var1 += a * a;
    m.var2 += b * b;
    m.cov += a * b;
  }
  const double denom = static_cast<double>(n - 1);
  m.var1 /= denom;
  m.var2 /= denom;
  m.cov /= denom;
  return m;
}

}  // namespace

JacobianEstimate jacobian_U_T(const Ensemble& ensemble, double T1, double T2) {
  if (!(T1 > 0.0) || !(T2 > 0.0)) throw Error("jacobian_U_T: temperatures must be positive");
  Moments m = energy_moments(ensemble);
  const double n = static_cast<double>(ensemble.size());
  JacobianEstimate j;
  j.value << n * m.var1 / (T1 * T1), n * m.cov / (T2 * T2), n * m.cov / (T1 * T1), n * m.var2 / (T2 * T2);
  j.degenerate = m.var1 == 0.0 || m.var2 == 0.0;
  return j;
}

Vector2 delta_temperatures(const Matrix2& jac, const Vector2& dU, double max_condition) {
  Eigen::JacobiSVD<Matrix2> svd(jac);
  const auto& sv = svd.singularValues();
  if (!(sv(1) > 0.0) || sv(0) / sv(1) > max_condition)
    throw RecalibrationNeeded("delta_temperatures: Jacobian singular or ill-conditioned");
  return jac.partialPivLu().solve(dU);
}

Matrix2 energy_covariance(const Ensemble& ensemble) {
  Moments m = energy_moments(ensemble);
  Matrix2 c;
  c << m.var1, m.cov, m.cov, m.var2;
  return c;
}

bool delta_inverse_temperatures(const Matrix2& energy_cov, std::size_t n, const Vector2& dU, Vector2& d_inv_t) {
  Matrix2 c = energy_cov * static_cast<double>(n);
  Eigen::CompleteOrthogonalDecomposition<Matrix2> cod(c);
  cod.setThreshold(1e-12);
  if (cod.rank() == 0) {
    d_inv_t.setZero();
    return false;
  }
  d_inv_t = -cod.pseudoInverse() * dU;
  return cod.rank() == 2;
}

Matrix2 onsager_summand(const Vector2& du, double inv_t1, double inv_t2) {
  double x = -du[0] * inv_t1 - du[1] * inv_t2;
  double w = x >= 0.0 ? 1.0 : std::exp(x);
  return w * (du * du.transpose());
}

OnsagerMatrix estimate_onsager(const Ensemble& ensemble, const Proposal& proposal, const Model& model,
                               double inv_t1, double inv_t2, std::size_t n_probe, const RngStream& rng,
                               std::size_t threads) {
  if (n_probe == 0) throw Error("estimate_onsager: n_probe must be >= 1");
  if (ensemble.size() == 0) throw Error("estimate_onsager: empty ensemble");
  std::vector<Matrix2> terms(n_probe, Matrix2::Zero());
  std::vector<std::uint8_t> simulated(n_probe, 0);
  parallel_for(n_probe, threads, [&](std::size_t k) {
    RngStream r = rng.split(k);
    const Particle& z = ensemble.particles[r.index(ensemble.size())];
    ParameterPoint theta = proposal.propose(z.theta, r);
    if (!model.in_support(theta)) return;  // zero prior weight, zero contribution
    OutputPoint x = model.simulate(theta, r);
    simulated[k] = 1;
    Vector2 du(model.distance(x) - z.u1, prior_energy(model, theta) - z.u2);
    terms[k] = onsager_summand(du, inv_t1, inv_t2);
  });
  OnsagerMatrix est;
  est.n_probe = n_probe;
  Matrix2 sum = Matrix2::Zero(), sq = Matrix2::Zero();
  for (std::size_t k = 0; k < n_probe; ++k) {
    sum += terms[k];
    sq += terms[k].cwiseProduct(terms[k]);
    est.sims_used += simulated[k];
  }
  const double n = static_cast<double>(n_probe);
  est.L = sum / n;
  // the summands are symmetric; this removes any rounding asymmetry
  est.L(1, 0) = est.L(0, 1);
  if (n_probe > 1) {
    Matrix2 var = (sq / n - est.L.cwiseProduct(est.L)) * (n / (n - 1.0));
    est.standard_error = (var.cwiseMax(0.0) / n).cwiseSqrt();
  }
  return est;
}

Recalibration recalibrate_general(const Vector2& target_mean, const std::vector<Particle>& store,
                                  double inv_t1_guess, double inv_t2_guess, double rel_tol,
                                  std::size_t max_iter) {
  if (store.empty()) throw Error("recalibrate: empty prior-predictive store");
  const std::size_t m = store.size();
  // Work in c = (1/T1, 1/T2 - 1); the store already carries one factor of the prior.
  Vector2 c(inv_t1_guess, inv_t2_guess - 1.0);

  // Scale for the residual test: spread of the unweighted store.
  Vector2 mean0 = Vector2::Zero(), sd0 = Vector2::Zero();
  for (const auto& p : store) mean0 += Vector2(p.u1, p.u2);
  mean0 /= static_cast<double>(m);
  for (const auto& p : store) sd0 += (Vector2(p.u1, p.u2) - mean0).cwiseAbs2();
  sd0 = (sd0 / static_cast<double>(m)).cwiseSqrt();

  std::vector<double> logw(m);
  auto evaluate = [&](const Vector2& cc, Vector2& mean, Matrix2& cov) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m; ++k) {
      logw[k] = -cc[0] * store[k].u1 - cc[1] * store[k].u2;
      mx = std::max(mx, logw[k]);
    }
    double z = 0.0;
    mean.setZero();
    for (std::size_t k = 0; k < m; ++k) {
      double w = std::exp(logw[k] - mx);
      z += w;
      mean += w * Vector2(store[k].u1, store[k].u2);
    }
    mean /= z;
    cov.setZero();
    for (std::size_t k = 0; k < m; ++k) {
      double w = std::exp(logw[k] - mx) / z;
      Vector2 d = Vector2(store[k].u1, store[k].u2) - mean;
      cov += w * d * d.transpose();
    }
    // log-partition function, up to the constant -ln M
    return mx + std::log(z);
  };
  auto residual_ok = [&](const Vector2& mean) {
    for (int j = 0; j < 2; ++j) {
      double scale = std::max({std::abs(target_mean[j]), sd0[j], 1e-300});
      if (std::abs(mean[j] - target_mean[j]) > rel_tol * scale) return false;
    }
    return true;
  };

  Recalibration out;
  Vector2 mean;
  Matrix2 cov;
  double logz = evaluate(c, mean, cov);
  double obj = logz + c.dot(target_mean);
  for (std::size_t it = 0; it < max_iter; ++it) {
    out.iterations = it;
    if (residual_ok(mean)) {
      out.converged = true;
      break;
    }
    Vector2 grad = target_mean - mean;
    Matrix2 h = cov;
    h.diagonal().array() += 1e-12 * std::max(1.0, h.trace());
    Vector2 step = -h.ldlt().solve(grad);
    if (!step.allFinite()) break;
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      Vector2 trial = c + t * step;
      Vector2 tm;
      Matrix2 tc;
      double tl = evaluate(trial, tm, tc);
      double tobj = tl + trial.dot(target_mean);
      if (std::isfinite(tobj) && tobj <= obj + 1e-4 * t * grad.dot(step)) {
        c = trial;
        mean = tm;
        cov = tc;
        obj = tobj;
        moved = true;
        break;
      }
    }
    if (!moved) {
      out.converged = residual_ok(mean);
      break;
    }
  }
  if (!out.converged) out.converged = residual_ok(mean);
  out.inv_t1 = c[0];
  out.inv_t2 = c[1] + 1.0;
  return out;
}

Recalibration recalibrate_temperatures(const Ensemble& ensemble, const std::vector<Particle>& store,
                                       AnnealCase which, double inv_t1_guess, double inv_t2_guess) {
  const double n = static_cast<double>(ensemble.size());
  if (which == AnnealCase::flat) {
    Recalibration r;
    double t1 = total_energy(ensemble, EnergyKind::u1) / n;
    r.inv_t1 = t1 > 0.0 ? 1.0 / t1 : std::numeric_limits<double>::infinity();
    r.converged = true;
    return r;
  }
  Vector2 target(total_energy(ensemble, EnergyKind::u1) / n, total_energy(ensemble, EnergyKind::u2) / n);
  return recalibrate_general(target, store, inv_t1_guess, inv_t2_guess);
}

}  // namespace sabc
