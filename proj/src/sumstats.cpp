#include "sabc/sumstats.hpp"

namespace sabc {

SummaryMap fit_linear_summaries(const std::vector<ParameterPoint>& pilot_thetas,
                                const std::vector<OutputPoint>& pilot_outputs) {
  if (pilot_thetas.size() != pilot_outputs.size() || pilot_thetas.empty())
    throw Error("fit_linear_summaries: pilot thetas and outputs must be nonempty and paired");
  const auto rows = static_cast<Eigen::Index>(pilot_thetas.size());
  const auto n = static_cast<Eigen::Index>(pilot_outputs.front().dim());
  const auto d = static_cast<Eigen::Index>(pilot_thetas.front().dim());
  if (rows < 10 * (n + 1)) throw Error("fit_linear_summaries: pilot size must be >= 10 * (output dim + 1)");

  Matrix design(rows, n + 1);
  Matrix target(rows, d);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& x = pilot_outputs[static_cast<std::size_t>(r)].values;
    const auto& t = pilot_thetas[static_cast<std::size_t>(r)].coords;
    if (x.size() != n || t.size() != d) throw Error("fit_linear_summaries: inconsistent dimensions");
    design(r, 0) = 1.0;
    design.row(r).tail(n) = x.transpose();
    target.row(r) = t.transpose();
  }

  SummaryMap map;
  Eigen::ColPivHouseholderQR<Matrix> qr(design);
  Matrix beta;
  if (qr.rank() == n + 1) {
    beta = qr.solve(target);
  } else {
    Matrix gram = design.transpose() * design;
    gram.diagonal().array() += 1e-6;
    beta = gram.ldlt().solve(design.transpose() * target);
    map.ridge_fallback = true;
  }
  map.coefficients = beta.transpose();
  return map;
}

OutputPoint apply_summaries(const SummaryMap& map, const OutputPoint& x) {
  if (x.dim() != map.input_dim()) throw Error("apply_summaries: dimension mismatch");
  const auto n = map.coefficients.cols() - 1;
  return OutputPoint(Vector(map.coefficients.col(0) + map.coefficients.rightCols(n) * x.values));
}

SummarizedModel::SummarizedModel(ModelPtr base, SummaryMap map)
    : base_(std::move(base)), map_(std::move(map)), data_(apply_summaries(map_, base_->data())) {}

ModelPtr maybe_summarize(ModelPtr model, SummaryMode mode, std::vector<Particle>& draws,
                         std::optional<SummaryMap>& fitted) {
  if (mode == SummaryMode::off || draws.empty()) return model;
  if (draws.front().output.dim() <= model->parameter_dim()) return model;
  std::vector<ParameterPoint> thetas;
  std::vector<OutputPoint> outputs;
  thetas.reserve(draws.size());
  outputs.reserve(draws.size());
  for (const auto& p : draws) {
    thetas.push_back(p.theta);
    outputs.push_back(p.output);
  }
  fitted = fit_linear_summaries(thetas, outputs);
  for (auto& p : draws) p.output = apply_summaries(*fitted, p.output);
  return std::make_shared<SummarizedModel>(std::move(model), *fitted);
}

}  // namespace sabc
