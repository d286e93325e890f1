#pragma once

#include <vector>

#include "sabc/core.hpp"

namespace sabc {

/// Affine projection x -> B [1, x] fitted by least squares of theta on x.
struct SummaryMap {
  Matrix coefficients;  // d x (n + 1); column 0 is the intercept
  bool ridge_fallback = false;

  std::size_t input_dim() const { return static_cast<std::size_t>(coefficients.cols()) - 1; }
  std::size_t output_dim() const { return static_cast<std::size_t>(coefficients.rows()); }
};

/// Ordinary least squares of each theta component on [1, x]. A rank-deficient
/// design falls back to ridge regression with penalty 1e-6 and sets the flag.
SummaryMap fit_linear_summaries(const std::vector<ParameterPoint>& pilot_thetas,
                                const std::vector<OutputPoint>& pilot_outputs);

OutputPoint apply_summaries(const SummaryMap& map, const OutputPoint& x);

/// Wraps a model so that simulated outputs and the data live in summary space.
class SummarizedModel final : public Model {
 public:
  SummarizedModel(ModelPtr base, SummaryMap map);

  std::string name() const override { return base_->name(); }
  std::size_t parameter_dim() const override { return base_->parameter_dim(); }
  OutputPoint simulate(const ParameterPoint& theta, RngStream& rng) const override {
    return apply_summaries(map_, base_->simulate(theta, rng));
  }
  ParameterPoint prior_sample(RngStream& rng) const override { return base_->prior_sample(rng); }
  const OutputPoint& data() const override { return data_; }
  double metric_alpha() const override { return base_->metric_alpha(); }
  bool in_support(const ParameterPoint& t) const override { return base_->in_support(t); }
  std::optional<double> prior_log_density(const ParameterPoint& t) const override {
    return base_->prior_log_density(t);
  }
  bool informative_prior() const override { return base_->informative_prior(); }
  const PosteriorOracle* posterior_oracle() const override { return base_->posterior_oracle(); }

  const SummaryMap& map() const { return map_; }

 private:
  ModelPtr base_;
  SummaryMap map_;
  OutputPoint data_;
};

/// Fits summaries on prior-predictive pairs and projects their outputs in place
/// when `mode` is automatic and the output dimension exceeds the parameter
/// dimension. Returns the model to use from then on.
ModelPtr maybe_summarize(ModelPtr model, SummaryMode mode, std::vector<Particle>& draws,
                         std::optional<SummaryMap>& fitted);

}  // namespace sabc
