#include "sabc/kernel.hpp"

#include <cmath>
#include <numbers>

namespace sabc {

JumpKernel::JumpKernel(Matrix cov) : cov_(std::move(cov)) {
  if (cov_.rows() != cov_.cols() || cov_.rows() == 0) throw DegenerateKernelError("jump kernel: covariance must be square");
  Eigen::LLT<Matrix> llt(cov_);
  if (llt.info() != Eigen::Success) throw DegenerateKernelError("jump kernel: covariance is not positive definite");
  chol_ = llt.matrixL();
  for (Eigen::Index i = 0; i < chol_.rows(); ++i) {
    if (!(chol_(i, i) > 0.0) || !std::isfinite(chol_(i, i)))
      throw DegenerateKernelError("jump kernel: covariance is not positive definite");
  }
  const double d = static_cast<double>(cov_.rows());
  log_norm_ = -0.5 * d * std::log(2.0 * std::numbers::pi) - chol_.diagonal().array().log().sum();
}

ParameterPoint JumpKernel::propose(const ParameterPoint& theta, RngStream& rng) const {
  Vector z(cov_.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return ParameterPoint(theta.coords + chol_ * z);
}

double JumpKernel::log_density(const ParameterPoint& from, const ParameterPoint& to) const {
  Vector diff = to.coords - from.coords;
  Vector w = chol_.triangularView<Eigen::Lower>().solve(diff);
  return log_norm_ - 0.5 * w.squaredNorm();
}

Matrix ensemble_covariance(const Ensemble& ensemble) {
  const std::size_t n = ensemble.size();
  if (n < 2) throw Error("ensemble_covariance: need at least two particles");
  const auto d = static_cast<Eigen::Index>(ensemble.particles.front().theta.dim());
  Vector mean = Vector::Zero(d);
  for (const auto& p : ensemble.particles) mean += p.theta.coords;
  mean /= static_cast<double>(n);
  Matrix cov = Matrix::Zero(d, d);
  for (const auto& p : ensemble.particles) {
    Vector c = p.theta.coords - mean;
    cov.noalias() += c * c.transpose();
  }
  return cov / static_cast<double>(n - 1);
}

JumpKernel build_kernel(const Matrix& sigma, double beta, double s) {
  if (!(beta > 0.0) || !(s >= 0.0)) throw Error("build_kernel: need beta > 0 and s >= 0");
  Matrix cov = beta * sigma;
  cov.diagonal().array() += s * sigma.trace();
  return JumpKernel(std::move(cov));
}

}  // namespace sabc
