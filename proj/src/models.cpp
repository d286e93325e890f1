#include "sabc/models.hpp"

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <cmath>
#include <numbers>

namespace sabc {

namespace {

// Integrates a one-dimensional oracle density over [lo, hi] and rejects it
// unless the mass is 1 within 1e-8.
template <class Density>
void check_normalized(Density f, double lo, double hi, const char* what) {
  double err = 0.0;
  double mass = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-12, &err);
  if (std::abs(mass - 1.0) > 1e-8) throw Error(std::string(what) + ": oracle density does not integrate to 1");
}

class TruncatedNormalOracle final : public PosteriorOracle {
 public:
  TruncatedNormalOracle(double mu, double sd, double lo, double hi) : mu_(mu), sd_(sd), lo_(lo), hi_(hi) {
    za_ = (lo_ - mu_) / sd_;
    zb_ = (hi_ - mu_) / sd_;
    mass_ = phi_cdf(zb_) - phi_cdf(za_);
    check_normalized([this](double t) { return density_1d(t); }, lo_, hi_, "truncated normal");
  }

  double marginal_cdf(std::size_t, double t) const override {
    if (t <= lo_) return 0.0;
    if (t >= hi_) return 1.0;
    return (phi_cdf((t - mu_) / sd_) - phi_cdf(za_)) / mass_;
  }
  double marginal_mean(std::size_t) const override {
    return mu_ + sd_ * (phi_pdf(za_) - phi_pdf(zb_)) / mass_;
  }
  double marginal_sd(std::size_t) const override {
    double r = (phi_pdf(za_) - phi_pdf(zb_)) / mass_;
    double q = (finite_times(za_, phi_pdf(za_)) - finite_times(zb_, phi_pdf(zb_))) / mass_;
    return sd_ * std::sqrt(1.0 + q - r * r);
  }
  double density(const ParameterPoint& theta) const override { return density_1d(theta.coords[0]); }

 private:
  static double phi_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
  static double phi_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
  static double finite_times(double z, double p) { return std::isfinite(z) ? z * p : 0.0; }
  double density_1d(double t) const {
    if (t < lo_ || t > hi_) return 0.0;
    return phi_pdf((t - mu_) / sd_) / (sd_ * mass_);
  }

  double mu_, sd_, lo_, hi_, za_, zb_, mass_;
};

class BetaOracle final : public PosteriorOracle {
 public:
  BetaOracle(double a, double b) : dist_(a, b) {
    check_normalized([this](double t) { return t <= 0.0 || t >= 1.0 ? 0.0 : boost::math::pdf(dist_, t); }, 0.0,
                     1.0, "beta");
  }
  double marginal_cdf(std::size_t, double t) const override {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return boost::math::cdf(dist_, t);
  }
  double marginal_mean(std::size_t) const override { return boost::math::mean(dist_); }
  double marginal_sd(std::size_t) const override { return boost::math::standard_deviation(dist_); }
  double density(const ParameterPoint& theta) const override {
    double t = theta.coords[0];
    return t <= 0.0 || t >= 1.0 ? 0.0 : boost::math::pdf(dist_, t);
  }

 private:
  boost::math::beta_distribution<double> dist_;
};

// Flat-prior bivariate Gaussian posterior: theta ~ N(y, Sigma) restricted to a box.
// Marginals use the per-component truncated normals.
class BivariateOracle final : public PosteriorOracle {
 public:
  BivariateOracle(const Eigen::Vector2d& y, const Eigen::Matrix2d& cov, double halfwidth)
      : m1_(y[0], std::sqrt(cov(0, 0)), -halfwidth, halfwidth),
        m2_(y[1], std::sqrt(cov(1, 1)), -halfwidth, halfwidth),
        y_(y),
        prec_(cov.inverse()),
        norm_(1.0 / (2.0 * std::numbers::pi * std::sqrt(cov.determinant()))),
        halfwidth_(halfwidth) {}

  double marginal_cdf(std::size_t j, double t) const override { return pick(j).marginal_cdf(0, t); }
  double marginal_mean(std::size_t j) const override { return pick(j).marginal_mean(0); }
  double marginal_sd(std::size_t j) const override { return pick(j).marginal_sd(0); }
  double density(const ParameterPoint& theta) const override {
    if (theta.coords.cwiseAbs().maxCoeff() > halfwidth_) return 0.0;
    Eigen::Vector2d d = theta.coords - y_;
    return norm_ * std::exp(-0.5 * d.dot(prec_ * d));
  }

 private:
  const TruncatedNormalOracle& pick(std::size_t j) const { return j == 0 ? m1_ : m2_; }
  TruncatedNormalOracle m1_, m2_;
  Eigen::Vector2d y_;
  Eigen::Matrix2d prec_;
  double norm_, halfwidth_;
};

}  // namespace

// gauss_mean

GaussMeanModel::GaussMeanModel(double sigma_obs, int n_obs, double y_bar, double prior_halfwidth, bool raw_output)
    : sigma_obs_(sigma_obs), n_obs_(n_obs), halfwidth_(prior_halfwidth), raw_output_(raw_output) {
  if (!(sigma_obs > 0.0)) throw Error("gauss_mean: sigma_obs must be > 0");
  if (n_obs < 1) throw Error("gauss_mean: n_obs must be >= 1");
  if (!(prior_halfwidth > 0.0)) throw Error("gauss_mean: prior_halfwidth must be > 0");
  data_ = raw_output ? OutputPoint(Vector::Constant(n_obs, y_bar)) : OutputPoint{y_bar};
  oracle_ = std::make_unique<TruncatedNormalOracle>(y_bar, sigma_obs / std::sqrt(double(n_obs)), -prior_halfwidth,
                                                    prior_halfwidth);
}

OutputPoint GaussMeanModel::simulate(const ParameterPoint& theta, RngStream& rng) const {
  Vector draws(n_obs_);
  for (int i = 0; i < n_obs_; ++i) draws[i] = theta.coords[0] + sigma_obs_ * rng.normal();
  if (raw_output_) return OutputPoint(std::move(draws));
  return OutputPoint{draws.mean()};
}

ParameterPoint GaussMeanModel::prior_sample(RngStream& rng) const {
  return ParameterPoint{-halfwidth_ + 2.0 * halfwidth_ * rng.uniform()};
}

bool GaussMeanModel::in_support(const ParameterPoint& theta) const {
  return std::abs(theta.coords[0]) <= halfwidth_;
}

std::optional<double> GaussMeanModel::prior_log_density(const ParameterPoint& theta) const {
  if (!in_support(theta)) return -std::numeric_limits<double>::infinity();
  return -std::log(2.0 * halfwidth_);
}

// beta_binomial

BetaBinomialModel::BetaBinomialModel(int n_trials, int y_obs, double prior_a, double prior_b)
    : n_trials_(n_trials), prior_a_(prior_a), prior_b_(prior_b) {
  if (n_trials < 0 || y_obs < 0 || y_obs > n_trials) throw Error("beta_binomial: need 0 <= y_obs <= n_trials");
  if (!(prior_a > 0.0) || !(prior_b > 0.0)) throw Error("beta_binomial: prior parameters must be > 0");
  log_beta_ = std::lgamma(prior_a) + std::lgamma(prior_b) - std::lgamma(prior_a + prior_b);
  data_ = OutputPoint::discrete(y_obs);
  oracle_ = std::make_unique<BetaOracle>(prior_a + y_obs, prior_b + n_trials - y_obs);
}

OutputPoint BetaBinomialModel::simulate(const ParameterPoint& theta, RngStream& rng) const {
  double p = std::clamp(theta.coords[0], 0.0, 1.0);
  return OutputPoint::discrete(rng.binomial(n_trials_, p));
}

ParameterPoint BetaBinomialModel::prior_sample(RngStream& rng) const {
  // Gamma ratio; std::gamma_distribution keeps the draw on the stream's engine
  std::gamma_distribution<double> ga(prior_a_, 1.0), gb(prior_b_, 1.0);
  double x = ga(rng.engine()), y = gb(rng.engine());
  return ParameterPoint{x / (x + y)};
}

bool BetaBinomialModel::in_support(const ParameterPoint& theta) const {
  return theta.coords[0] > 0.0 && theta.coords[0] < 1.0;
}

std::optional<double> BetaBinomialModel::prior_log_density(const ParameterPoint& theta) const {
  if (!in_support(theta)) return -std::numeric_limits<double>::infinity();
  const double t = theta.coords[0];
  return (prior_a_ - 1.0) * std::log(t) + (prior_b_ - 1.0) * std::log1p(-t) - log_beta_;
}

double BetaBinomialModel::prior_energy_mean() const {
  using boost::math::digamma;
  const double ab = prior_a_ + prior_b_;
  return log_beta_ - (prior_a_ - 1.0) * (digamma(prior_a_) - digamma(ab)) -
         (prior_b_ - 1.0) * (digamma(prior_b_) - digamma(ab));
}

double BetaBinomialModel::prior_energy_sd() const {
  using boost::math::trigamma;
  const double ab = prior_a_ + prior_b_;
  const double am = prior_a_ - 1.0, bm = prior_b_ - 1.0;
  const double var = am * am * (trigamma(prior_a_) - trigamma(ab)) + bm * bm * (trigamma(prior_b_) - trigamma(ab)) -
                     2.0 * am * bm * trigamma(ab);
  return std::sqrt(std::max(0.0, var));
}

// bivariate_gauss

BivariateGaussModel::BivariateGaussModel(double y1, double y2, double sigma1, double sigma2, double rho,
                                         double prior_halfwidth)
    : rho_(rho), halfwidth_(prior_halfwidth) {
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) throw Error("bivariate_gauss: sigmas must be > 0");
  if (!(std::abs(rho) < 1.0)) throw Error("bivariate_gauss: |rho| must be < 1");
  if (!(prior_halfwidth > 0.0)) throw Error("bivariate_gauss: prior_halfwidth must be > 0");
  noise_cov_ << sigma1 * sigma1, rho * sigma1 * sigma2, rho * sigma1 * sigma2, sigma2 * sigma2;
  noise_chol_ = noise_cov_.llt().matrixL();
  data_ = OutputPoint{y1, y2};
  oracle_ = std::make_unique<BivariateOracle>(Eigen::Vector2d(y1, y2), noise_cov_, prior_halfwidth);
}

OutputPoint BivariateGaussModel::simulate(const ParameterPoint& theta, RngStream& rng) const {
  Eigen::Vector2d z(rng.normal(), rng.normal());
  return OutputPoint(Vector(theta.coords + noise_chol_ * z));
}

ParameterPoint BivariateGaussModel::prior_sample(RngStream& rng) const {
  double a = -halfwidth_ + 2.0 * halfwidth_ * rng.uniform();
  double b = -halfwidth_ + 2.0 * halfwidth_ * rng.uniform();
  return ParameterPoint{a, b};
}

bool BivariateGaussModel::in_support(const ParameterPoint& theta) const {
  return theta.coords.cwiseAbs().maxCoeff() <= halfwidth_;
}

std::optional<double> BivariateGaussModel::prior_log_density(const ParameterPoint& theta) const {
  if (!in_support(theta)) return -std::numeric_limits<double>::infinity();
  return -2.0 * std::log(2.0 * halfwidth_);
}

// finite chain

FiniteChainSpec FiniteChainSpec::defaults() {
  FiniteChainSpec s;
  s.theta_grid = {0, 1, 2, 3, 4};
  s.output_grid = {0, 1, 2, 3, 4, 5};
  s.likelihood_table = {
      {0.40, 0.25, 0.15, 0.10, 0.06, 0.04}, {0.20, 0.30, 0.20, 0.15, 0.10, 0.05},
      {0.10, 0.15, 0.35, 0.20, 0.12, 0.08}, {0.05, 0.10, 0.20, 0.30, 0.20, 0.15},
      {0.04, 0.06, 0.10, 0.20, 0.25, 0.35},
  };
  s.prior_weights = {0.10, 0.15, 0.30, 0.25, 0.20};
  s.data_index = 2;
  return s;
}

void FiniteChainSpec::validate() const {
  const std::size_t k = theta_grid.size(), j = output_grid.size();
  if (k == 0 || j == 0) throw Error("finite chain: empty grid");
  if (likelihood_table.size() != k || prior_weights.size() != k) throw Error("finite chain: table shape mismatch");
  for (const auto& row : likelihood_table) {
    if (row.size() != j) throw Error("finite chain: table shape mismatch");
    double sum = 0.0;
    for (double p : row) {
      if (!(p >= 0.0)) throw Error("finite chain: negative likelihood");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw Error("finite chain: likelihood rows must sum to 1");
  }
  double prior = 0.0;
  for (double w : prior_weights) {
    if (!(w > 0.0)) throw Error("finite chain: prior weights must be positive");
    prior += w;
  }
  if (std::abs(prior - 1.0) > 1e-12) throw Error("finite chain: prior weights must sum to 1");
  if (data_index >= j) throw Error("finite chain: data_index out of range");
}

double FiniteChainSpec::u1(std::size_t j) const { return std::abs(output_grid[j] - output_grid[data_index]); }

double FiniteChainSpec::u2(std::size_t k) const { return -std::log(prior_weights[k]); }

FiniteChainModel::FiniteChainModel(FiniteChainSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  data_ = OutputPoint{spec_.output_grid[spec_.data_index]};
}

std::size_t FiniteChainModel::theta_index(const ParameterPoint& theta) const {
  for (std::size_t k = 0; k < spec_.theta_grid.size(); ++k)
    if (spec_.theta_grid[k] == theta.coords[0]) return k;
  throw Error("finite chain: parameter not on grid");
}

std::size_t FiniteChainModel::output_index(const OutputPoint& x) const {
  for (std::size_t j = 0; j < spec_.output_grid.size(); ++j)
    if (spec_.output_grid[j] == x.values[0]) return j;
  throw Error("finite chain: output not on grid");
}

OutputPoint FiniteChainModel::simulate(const ParameterPoint& theta, RngStream& rng) const {
  const auto& row = spec_.likelihood_table[theta_index(theta)];
  return OutputPoint{spec_.output_grid[rng.categorical(row)]};
}

ParameterPoint FiniteChainModel::prior_sample(RngStream& rng) const {
  return ParameterPoint{spec_.theta_grid[rng.categorical(spec_.prior_weights)]};
}

ParameterPoint FiniteChainModel::uniform_grid_draw(RngStream& rng) const {
  return ParameterPoint{spec_.theta_grid[rng.index(spec_.theta_grid.size())]};
}

bool FiniteChainModel::in_support(const ParameterPoint& theta) const {
  for (double t : spec_.theta_grid)
    if (t == theta.coords[0]) return true;
  return false;
}

std::optional<double> FiniteChainModel::prior_log_density(const ParameterPoint& theta) const {
  if (!in_support(theta)) return -std::numeric_limits<double>::infinity();
  return std::log(spec_.prior_weights[theta_index(theta)]);
}

namespace {

double gibbs_exponent(const FiniteChainSpec& spec, std::size_t k, std::size_t j, double inv_te1,
                      std::optional<double> inv_te2) {
  double e = -spec.u1(j) * inv_te1;
  if (inv_te2) e -= spec.u2(k) * *inv_te2;
  return e;
}

}  // namespace

Matrix build_transition_matrix(const FiniteChainSpec& spec, double inv_te1, std::optional<double> inv_te2) {
  spec.validate();
  const std::size_t kk = spec.theta_grid.size(), jj = spec.output_grid.size(), s = kk * jj;
  const double jump = 1.0 / static_cast<double>(kk);
  Matrix p = Matrix::Zero(s, s);
  for (std::size_t k = 0; k < kk; ++k) {
    for (std::size_t j = 0; j < jj; ++j) {
      const std::size_t from = k * jj + j;
      const double e0 = gibbs_exponent(spec, k, j, inv_te1, inv_te2);
      double off = 0.0;
      for (std::size_t k2 = 0; k2 < kk; ++k2) {
        for (std::size_t j2 = 0; j2 < jj; ++j2) {
          const std::size_t to = k2 * jj + j2;
          if (to == from) continue;
          const double x = gibbs_exponent(spec, k2, j2, inv_te1, inv_te2) - e0;
          const double acc = x >= 0.0 ? 1.0 : std::exp(x);
          p(from, to) = jump * spec.likelihood_table[k2][j2] * acc;
          off += p(from, to);
        }
      }
      if (off > 1.0 + 1e-14) throw Error("build_transition_matrix: negative diagonal");
      p(from, from) = 1.0 - off;
    }
  }
  return p;
}

Vector gibbs_distribution(const FiniteChainSpec& spec, double inv_te1, std::optional<double> inv_te2) {
  spec.validate();
  const std::size_t kk = spec.theta_grid.size(), jj = spec.output_grid.size();
  Vector pi(kk * jj);
  for (std::size_t k = 0; k < kk; ++k)
    for (std::size_t j = 0; j < jj; ++j)
      pi[k * jj + j] = spec.likelihood_table[k][j] * std::exp(gibbs_exponent(spec, k, j, inv_te1, inv_te2));
  return pi / pi.sum();
}

Vector stationary_distribution(const Matrix& transition, double tol, std::size_t max_iter) {
  const auto s = transition.rows();
  Eigen::RowVectorXd pi = Eigen::RowVectorXd::Constant(s, 1.0 / static_cast<double>(s));
  for (std::size_t it = 0; it < max_iter; ++it) {
    Eigen::RowVectorXd next = pi * transition;
    next /= next.sum();
    const double change = (next - pi).cwiseAbs().maxCoeff();
    pi = next;
    if (change < tol) break;
  }
  return pi.transpose();
}

// registry

namespace {

double take(ModelParams& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  if (it == p.end()) return fallback;
  double v = it->second;
  p.erase(it);
  return v;
}

int take_int(ModelParams& p, const std::string& key, int fallback) {
  double v = take(p, key, fallback);
  if (v != std::floor(v)) throw Error("model parameter '" + key + "' must be an integer");
  return static_cast<int>(v);
}

}  // namespace

std::vector<std::string> model_names() { return {"gauss_mean", "beta_binomial", "bivariate_gauss", "finite_chain"}; }

ModelPtr make_model(const std::string& name, const ModelParams& overrides) {
  ModelParams p = overrides;
  ModelPtr model;
  if (name == "gauss_mean") {
    double sigma = take(p, "sigma_obs", 1.0);
    int n_obs = take_int(p, "n_obs", 5);
    double y_bar = take(p, "y_bar", 0.0);
    double hw = take(p, "prior_halfwidth", 10.0);
    bool raw = take(p, "raw_output", 0.0) != 0.0;
    model = std::make_shared<GaussMeanModel>(sigma, n_obs, y_bar, hw, raw);
  } else if (name == "beta_binomial") {
    int n = take_int(p, "n_trials", 20);
    int y = take_int(p, "y_obs", 12);
    double a = take(p, "prior_a", 1.0);
    double b = take(p, "prior_b", 1.0);
    model = std::make_shared<BetaBinomialModel>(n, y, a, b);
  } else if (name == "bivariate_gauss") {
    double y1 = take(p, "y1", 0.0), y2 = take(p, "y2", 0.0);
    double s1 = take(p, "sigma1", 1.0), s2 = take(p, "sigma2", 1.0);
    double rho = take(p, "rho", 0.7);
    double hw = take(p, "prior_halfwidth", 10.0);
    model = std::make_shared<BivariateGaussModel>(y1, y2, s1, s2, rho, hw);
  } else if (name == "finite_chain") {
    FiniteChainSpec spec = FiniteChainSpec::defaults();
    spec.data_index = static_cast<std::size_t>(take_int(p, "data_index", static_cast<int>(spec.data_index)));
    model = std::make_shared<FiniteChainModel>(std::move(spec));
  } else {
    throw Error("unknown model '" + name + "'");
  }
  if (!p.empty()) throw Error("unknown parameter '" + p.begin()->first + "' for model '" + name + "'");
  return model;
}

}  // namespace sabc
