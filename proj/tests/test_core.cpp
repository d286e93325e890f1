#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "sabc/core.hpp"
#include "sabc/metric.hpp"
#include "sabc/models.hpp"

using namespace sabc;

namespace {

// Simulator without a prior density.
class NoDensityModel final : public Model {
 public:
  std::string name() const override { return "no_density"; }
  std::size_t parameter_dim() const override { return 1; }
  OutputPoint simulate(const ParameterPoint& t, RngStream& r) const override {
    return OutputPoint{t.coords[0] + r.normal()};
  }
  ParameterPoint prior_sample(RngStream& r) const override { return ParameterPoint{r.uniform()}; }
  const OutputPoint& data() const override { return data_; }

 private:
  OutputPoint data_{0.0};
};

Ensemble small_ensemble(const Model& model, std::size_t n, std::uint64_t seed) {
  Ensemble e;
  e.particles = draw_prior_predictive(model, n, RngStream(seed));
  return e;
}

}  // namespace

TEST(RecomputeEnergies, OutputEqualToDataHasZeroDistance) {
  GaussMeanModel model(1.0, 5, 0.3, 10.0);
  Ensemble e;
  e.particles.push_back(Particle{ParameterPoint{0.1}, model.data()});
  e = recompute_energies(e, model, nullptr, false);
  EXPECT_EQ(e.particles[0].u1, 0.0);
}

TEST(RecomputeEnergies, Idempotent) {
  BetaBinomialModel model(20, 12, 2.0, 5.0);
  Ensemble e = small_ensemble(model, 50, 3);
  Ensemble once = recompute_energies(e, model, nullptr, true);
  Ensemble twice = recompute_energies(once, model, nullptr, true);
  ASSERT_EQ(once.size(), twice.size());
  for (std::size_t i = 0; i < once.size(); ++i) {
    EXPECT_EQ(once.particles[i].u1, twice.particles[i].u1);
    EXPECT_EQ(once.particles[i].u2, twice.particles[i].u2);
  }
}

TEST(RecomputeEnergies, BetaPriorEnergyAtHalf) {
  BetaBinomialModel model(20, 12, 2.0, 5.0);
  Ensemble e;
  e.particles.push_back(Particle{ParameterPoint{0.5}, OutputPoint::discrete(12)});
  e = recompute_energies(e, model, nullptr, true);
  EXPECT_NEAR(e.particles[0].u2, -std::log(30.0 * 0.5 * std::pow(0.5, 4)), 1e-12);
  EXPECT_EQ(e.particles[0].u1, 0.0);
}

TEST(RecomputeEnergies, FlatCaseZeroesPriorEnergy) {
  BetaBinomialModel model(20, 12, 2.0, 5.0);
  Ensemble e = small_ensemble(model, 10, 4);
  for (auto& p : e.particles) p.u2 = 99.0;
  e = recompute_energies(e, model, nullptr, false);
  for (const auto& p : e.particles) EXPECT_EQ(p.u2, 0.0);
}

TEST(RecomputeEnergies, UsesTransformWhenGiven) {
  GaussMeanModel model(1.0, 5, 0.0, 10.0);
  EnergyTransform t({0.1, 0.2, 0.3});
  Ensemble e;
  OutputPoint x{std::sqrt(0.3)};  // rho = x^2 / 2 = 0.15
  e.particles.push_back(Particle{ParameterPoint{0.0}, x});
  e = recompute_energies(e, model, &t, false);
  EXPECT_NEAR(e.particles[0].u1, 0.375, 1e-12);
}

TEST(RecomputeEnergies, MissingPriorDensityIsAnError) {
  NoDensityModel model;
  Ensemble e = small_ensemble(model, 3, 1);
  EXPECT_THROW(recompute_energies(e, model, nullptr, true), Error);
  EXPECT_NO_THROW(recompute_energies(e, model, nullptr, false));
}

TEST(RecomputeEnergies, PreservesEnsembleSize) {
  GaussMeanModel model(1.0, 5, 0.0, 10.0);
  Ensemble e = small_ensemble(model, 37, 2);
  EXPECT_EQ(recompute_energies(e, model, nullptr, false).size(), 37u);
}

TEST(RunConfig, DefaultsAreValid) {
  RunConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.oversample(), 10 * c.n_particles);
  EXPECT_EQ(c.probes(), c.n_particles / 10);
}

TEST(RunConfig, ReportsEveryViolation) {
  RunConfig c;
  c.n_particles = 0;
  c.v = -1.0;
  c.a = 0.0;
  try {
    c.validate();
    FAIL() << "expected an error";
  } catch (const Error& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("n_particles"), std::string::npos);
    EXPECT_NE(msg.find("v must"), std::string::npos);
    EXPECT_NE(msg.find("a must"), std::string::npos);
  }
}

TEST(RunConfig, OversampleBelowParticlesRejected) {
  RunConfig c;
  c.n_particles = 100;
  c.init_oversample = 50;
  EXPECT_THROW(c.validate(), Error);
}

TEST(PriorPredictive, IndependentOfThreadCount) {
  BetaBinomialModel model(20, 12, 2.0, 5.0);
  auto a = draw_prior_predictive(model, 200, RngStream(9), 1);
  auto b = draw_prior_predictive(model, 200, RngStream(9), 4);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].theta, b[i].theta);
    EXPECT_EQ(a[i].output, b[i].output);
  }
}

TEST(Subsample, FullSizeKeepsOrder) {
  GaussMeanModel model(1.0, 5, 0.0, 10.0);
  auto pool = draw_prior_predictive(model, 20, RngStream(1));
  RngStream r(2);
  auto out = subsample(pool, 20, r);
  for (std::size_t i = 0; i < pool.size(); ++i) EXPECT_EQ(out[i].theta, pool[i].theta);
}

TEST(Subsample, WithoutReplacement) {
  GaussMeanModel model(1.0, 5, 0.0, 10.0);
  auto pool = draw_prior_predictive(model, 100, RngStream(1));
  RngStream r(3);
  auto out = subsample(pool, 60, r);
  std::set<double> seen;
  for (const auto& p : out) seen.insert(p.theta.coords[0]);
  EXPECT_EQ(seen.size(), 60u);
}

TEST(Subsample, TooManyRequested) {
  std::vector<Particle> pool(3);
  RngStream r(1);
  EXPECT_THROW(subsample(pool, 4, r), Error);
}

TEST(PriorEnergy, ThrowsWithoutDensity) {
  NoDensityModel model;
  EXPECT_THROW(prior_energy(model, ParameterPoint{0.5}), Error);
}
