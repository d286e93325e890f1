#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sabc/rng.hpp"

namespace sabc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model parameters theta.
struct ParameterPoint {
  Vector coords;

  ParameterPoint() = default;
  explicit ParameterPoint(Vector c) : coords(std::move(c)) {}
  ParameterPoint(std::initializer_list<double> c);

  std::size_t dim() const { return static_cast<std::size_t>(coords.size()); }
  bool operator==(const ParameterPoint& o) const { return coords == o.coords; }
};

/// Model output x. Discrete-output models store a single integer-valued entry.
struct OutputPoint {
  Vector values;

  OutputPoint() = default;
  explicit OutputPoint(Vector v) : values(std::move(v)) {}
  OutputPoint(std::initializer_list<double> v);
  static OutputPoint discrete(std::int64_t count);

  std::size_t dim() const { return static_cast<std::size_t>(values.size()); }
  bool operator==(const OutputPoint& o) const { return values == o.values; }
};

struct Particle {
  ParameterPoint theta;
  OutputPoint output;
  double u1 = 0.0;  // distance energy (transformed in the flat case)
  double u2 = 0.0;  // prior energy, -ln f_pri(theta); 0 in the flat case
};

struct Ensemble {
  std::vector<Particle> particles;
  std::size_t sweep_count = 0;

  std::size_t size() const { return particles.size(); }
};

/// Exact posterior information for the bundled models.
class PosteriorOracle {
 public:
  virtual ~PosteriorOracle() = default;
  virtual double marginal_cdf(std::size_t j, double t) const = 0;
  virtual double marginal_mean(std::size_t j) const = 0;
  virtual double marginal_sd(std::size_t j) const = 0;
  virtual double density(const ParameterPoint& theta) const = 0;
};

/// Black-box simulator plus prior. Likelihood densities are never required.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::string name() const = 0;
  virtual std::size_t parameter_dim() const = 0;

  virtual OutputPoint simulate(const ParameterPoint& theta, RngStream& rng) const = 0;
  virtual ParameterPoint prior_sample(RngStream& rng) const = 0;
  virtual const OutputPoint& data() const = 0;

  /// User metric rho(x, y) against the observed data.
  virtual double distance(const OutputPoint& x) const;
  virtual double metric_alpha() const { return 2.0; }

  /// Proposals outside the prior support are rejected without simulation.
  virtual bool in_support(const ParameterPoint&) const { return true; }
  virtual std::optional<double> prior_log_density(const ParameterPoint&) const {
    return std::nullopt;
  }
  /// True when the prior carries information and the two-energy annealer applies.
  virtual bool informative_prior() const { return false; }
  virtual const PosteriorOracle* posterior_oracle() const { return nullptr; }
};

using ModelPtr = std::shared_ptr<const Model>;

/// -ln f_pri(theta); throws when the model has no prior density.
double prior_energy(const Model& model, const ParameterPoint& theta);

enum class ProposalKind { gaussian, prior };
enum class SummaryMode { off, automatic };

struct RunConfig {
  std::size_t n_particles = 1000;
  std::uint64_t sim_budget = 100000;
  double v = 0.5;
  double beta = 1.0;
  double s = 0.01;
  double a = 1.0;
  std::size_t init_oversample = 0;  // 0: 10 * n_particles
  std::uint64_t seed = 1;
  bool adapt_covariance = false;
  std::size_t recalibration_period = 25;
  double te_floor = 1e-4;
  std::size_t onsager_period = 10;
  std::size_t n_probe = 0;  // 0: n_particles / 10
  ProposalKind proposal = ProposalKind::gaussian;
  double fixed_te = 0.0;  // > 0 pins the flat-case environment temperature
  SummaryMode summaries = SummaryMode::off;
  std::size_t threads = 1;

  std::size_t oversample() const { return init_oversample ? init_oversample : 10 * n_particles; }
  std::size_t probes() const { return n_probe ? n_probe : std::max<std::size_t>(1, n_particles / 10); }
  /// Throws Error listing every violated constraint.
  void validate() const;
};

class EnergyTransform;

/// Recomputes u1 (and u2 when `prior_energies`) from stored outputs and parameters.
Ensemble recompute_energies(Ensemble ensemble, const Model& model, const EnergyTransform* transform,
                            bool prior_energies);

/// Draws `count` (theta, x) pairs from the prior predictive. Energies are left at zero.
std::vector<Particle> draw_prior_predictive(const Model& model, std::size_t count, const RngStream& rng,
                                            std::size_t threads = 1);

/// Selects `n` of `pool` uniformly without replacement; `pool.size() == n` keeps the order.
std::vector<Particle> subsample(const std::vector<Particle>& pool, std::size_t n, RngStream& rng);

}  // namespace sabc
