#pragma once

#include <map>
#include <string>
#include <vector>

#include "sabc/core.hpp"

namespace sabc {

/// Normal mean with a wide uniform prior (negligible prior knowledge).
/// The output is the sample mean of n_obs draws, or the raw draws when `raw_output`.
class GaussMeanModel final : public Model {
 public:
  GaussMeanModel(double sigma_obs, int n_obs, double y_bar, double prior_halfwidth, bool raw_output = false);

  std::string name() const override { return "gauss_mean"; }
  std::size_t parameter_dim() const override { return 1; }
  OutputPoint simulate(const ParameterPoint& theta, RngStream& rng) const override;
  ParameterPoint prior_sample(RngStream& rng) const override;
  const OutputPoint& data() const override { return data_; }
  bool in_support(const ParameterPoint& theta) const override;
  std::optional<double> prior_log_density(const ParameterPoint& theta) const override;
  const PosteriorOracle* posterior_oracle() const override { return oracle_.get(); }

 private:
  double sigma_obs_;
  int n_obs_;
  double halfwidth_;
  bool raw_output_;
  OutputPoint data_;
  std::unique_ptr<PosteriorOracle> oracle_;
};

/// Binomial(n_trials, theta) count with a Beta(prior_a, prior_b) prior; metric |x - y|.
class BetaBinomialModel final : public Model {
 public:
  BetaBinomialModel(int n_trials, int y_obs, double prior_a, double prior_b);

  std::string name() const override { return "beta_binomial"; }
  std::size_t parameter_dim() const override { return 1; }
  OutputPoint simulate(const ParameterPoint& theta, RngStream& rng) const override;
  ParameterPoint prior_sample(RngStream& rng) const override;
  const OutputPoint& data() const override { return data_; }
  double metric_alpha() const override { return 1.0; }
  bool in_support(const ParameterPoint& theta) const override;
  std::optional<double> prior_log_density(const ParameterPoint& theta) const override;
  bool informative_prior() const override { return !(prior_a_ == 1.0 && prior_b_ == 1.0); }
  const PosteriorOracle* posterior_oracle() const override { return oracle_.get(); }

  /// Analytic E[-ln f_pri(theta)] under the prior.
  double prior_energy_mean() const;
  double prior_energy_sd() const;

 private:
  int n_trials_;
  double prior_a_, prior_b_;
  double log_beta_;
  OutputPoint data_;
  std::unique_ptr<PosteriorOracle> oracle_;
};

/// Two-dimensional theta observed with correlated Gaussian noise, flat box prior.
class BivariateGaussModel final : public Model {
 public:
  BivariateGaussModel(double y1, double y2, double sigma1, double sigma2, double rho, double prior_halfwidth);

  std::string name() const override { return "bivariate_gauss"; }
  std::size_t parameter_dim() const override { return 2; }
  OutputPoint simulate(const ParameterPoint& theta, RngStream& rng) const override;
  ParameterPoint prior_sample(RngStream& rng) const override;
  const OutputPoint& data() const override { return data_; }
  bool in_support(const ParameterPoint& theta) const override;
  std::optional<double> prior_log_density(const ParameterPoint& theta) const override;
  const PosteriorOracle* posterior_oracle() const override { return oracle_.get(); }

  const Eigen::Matrix2d& noise_covariance() const { return noise_cov_; }
  double noise_correlation() const { return rho_; }

 private:
  double rho_;
  double halfwidth_;
  Eigen::Matrix2d noise_cov_;
  Eigen::Matrix2d noise_chol_;
  OutputPoint data_;
  std::unique_ptr<PosteriorOracle> oracle_;
};

/// Finite parameter and output grids with an explicit likelihood table.
struct FiniteChainSpec {
  std::vector<double> theta_grid;
  std::vector<double> output_grid;
  std::vector<std::vector<double>> likelihood_table;  // K x J, rows sum to 1
  std::vector<double> prior_weights;                  // K, sums to 1
  std::size_t data_index = 0;

  /// K = 5 parameter values, J = 6 outputs, strictly positive likelihood table.
  static FiniteChainSpec defaults();
  void validate() const;

  std::size_t states() const { return theta_grid.size() * output_grid.size(); }
  /// u1 = |x - y| of output j.
  double u1(std::size_t j) const;
  /// u2 = -ln prior weight of parameter k.
  double u2(std::size_t k) const;
};

class FiniteChainModel final : public Model {
 public:
  explicit FiniteChainModel(FiniteChainSpec spec);

  std::string name() const override { return "finite_chain"; }
  std::size_t parameter_dim() const override { return 1; }
  OutputPoint simulate(const ParameterPoint& theta, RngStream& rng) const override;
  ParameterPoint prior_sample(RngStream& rng) const override;
  const OutputPoint& data() const override { return data_; }
  double metric_alpha() const override { return 1.0; }
  bool in_support(const ParameterPoint& theta) const override;
  std::optional<double> prior_log_density(const ParameterPoint& theta) const override;
  bool informative_prior() const override { return true; }

  /// Uniform draw over the parameter grid (the chain's jump kernel k = 1/K).
  ParameterPoint uniform_grid_draw(RngStream& rng) const;
  std::size_t theta_index(const ParameterPoint& theta) const;
  std::size_t output_index(const OutputPoint& x) const;
  const FiniteChainSpec& spec() const { return spec_; }

 private:
  FiniteChainSpec spec_;
  OutputPoint data_;
};

/// Explicit Markov matrix over the K*J states (state index k * J + j) with the
/// uniform jump kernel. Single temperature (inv_te2 absent) uses a flat prior;
/// otherwise the prior energy enters with 1/Te2. Inverse temperatures may be 0.
Matrix build_transition_matrix(const FiniteChainSpec& spec, double inv_te1, std::optional<double> inv_te2 = {});

/// Normalized Gibbs target L(x|theta) exp(-u1/Te1 - u2/Te2) over the same states
/// (flat prior when inv_te2 is absent).
Vector gibbs_distribution(const FiniteChainSpec& spec, double inv_te1, std::optional<double> inv_te2 = {});

/// Left eigenvector of a row-stochastic matrix by power iteration.
Vector stationary_distribution(const Matrix& transition, double tol = 1e-15, std::size_t max_iter = 1000000);

using ModelParams = std::map<std::string, double>;

/// Builds a bundled model by registry name with parameter overrides; unknown
/// names or parameters throw.
ModelPtr make_model(const std::string& name, const ModelParams& overrides = {});
std::vector<std::string> model_names();

}  // namespace sabc
