#pragma once

#include <functional>

#include "sabc/core.hpp"

namespace sabc {

class DegenerateKernelError : public Error {
 public:
  using Error::Error;
};

/// Gaussian jump with covariance beta * Sigma + s * tr(Sigma) * I.
class JumpKernel {
 public:
  /// Throws DegenerateKernelError if `cov` is not positive definite.
  explicit JumpKernel(Matrix cov);

  const Matrix& cov() const { return cov_; }
  const Matrix& chol() const { return chol_; }
  std::size_t dim() const { return static_cast<std::size_t>(cov_.rows()); }

  ParameterPoint propose(const ParameterPoint& theta, RngStream& rng) const;
  /// log k(from -> to), including the normalizing constant.
  double log_density(const ParameterPoint& from, const ParameterPoint& to) const;

 private:
  Matrix cov_;
  Matrix chol_;
  double log_norm_ = 0.0;
};

/// Unbiased (N-1) sample covariance of particle parameters.
Matrix ensemble_covariance(const Ensemble& ensemble);

JumpKernel build_kernel(const Matrix& sigma, double beta, double s);

inline ParameterPoint propose(const JumpKernel& kernel, const ParameterPoint& theta, RngStream& rng) {
  return kernel.propose(theta, rng);
}

/// Move generator used by the sweeps and probes.
class Proposal {
 public:
  virtual ~Proposal() = default;
  virtual ParameterPoint propose(const ParameterPoint& theta, RngStream& rng) const = 0;
};

class GaussianProposal final : public Proposal {
 public:
  explicit GaussianProposal(JumpKernel kernel) : kernel_(std::move(kernel)) {}
  ParameterPoint propose(const ParameterPoint& theta, RngStream& rng) const override {
    return kernel_.propose(theta, rng);
  }
  const JumpKernel& kernel() const { return kernel_; }

 private:
  JumpKernel kernel_;
};

/// Ignores the current point and draws a fresh one, e.g. from a flat prior
/// (the infinitely-fast-mixing limit) or uniformly over a finite grid.
class IndependentProposal final : public Proposal {
 public:
  using Sampler = std::function<ParameterPoint(RngStream&)>;
  explicit IndependentProposal(Sampler draw) : draw_(std::move(draw)) {}
  ParameterPoint propose(const ParameterPoint&, RngStream& rng) const override { return draw_(rng); }

 private:
  Sampler draw_;
};

}  // namespace sabc
