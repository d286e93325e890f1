#include "sabc/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>

namespace sabc {

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string format_real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string posterior_csv(const std::vector<ParameterPoint>& thetas) {
  std::string out;
  const std::size_t d = thetas.empty() ? 1 : thetas.front().dim();
  for (std::size_t j = 0; j < d; ++j) out += (j ? ",theta_" : "theta_") + std::to_string(j + 1);
  out += '\n';
  for (const auto& t : thetas) {
    for (std::size_t j = 0; j < d; ++j) {
      if (j) out += ',';
      out += format_real(t.coords[static_cast<Eigen::Index>(j)]);
    }
    out += '\n';
  }
  return out;
}

std::string posterior_csv(const Ensemble& ensemble) {
  std::vector<ParameterPoint> thetas;
  thetas.reserve(ensemble.size());
  for (const auto& p : ensemble.particles) thetas.push_back(p.theta);
  return posterior_csv(thetas);
}

std::string trace_csv(const std::vector<ThermoState>& trace) {
  std::string out = "sweep,sims,U1,U2,T1,T2,Te1,Te2,acc_rate,sigma_dot,sigma_cum,flags\n";
  for (const auto& r : trace) {
    out += std::to_string(r.sweep) + ',' + std::to_string(r.sims_used) + ',' + format_real(r.U1) + ',' +
           format_real(r.U2) + ',' + format_real(r.T1()) + ',' + format_real(r.T2()) + ',' + format_real(r.Te1()) +
           ',' + format_real(r.Te2()) + ',' + format_real(r.acc_rate) + ',' + format_real(r.sigma_dot) + ',' +
           format_real(r.sigma_cum) + ',' + describe_flags(r.flags) + '\n';
  }
  return out;
}

std::string summaries_json(const SummaryMap& map) {
  nlohmann::json j;
  j["ridge_fallback"] = map.ridge_fallback;
  j["input_dim"] = map.input_dim();
  j["output_dim"] = map.output_dim();
  auto& rows = j["coefficients"] = nlohmann::json::array();
  for (Eigen::Index r = 0; r < map.coefficients.rows(); ++r) {
    std::vector<double> row(map.coefficients.cols());
    for (Eigen::Index c = 0; c < map.coefficients.cols(); ++c) row[static_cast<std::size_t>(c)] = map.coefficients(r, c);
    rows.push_back(row);
  }
  return j.dump(2) + "\n";
}

}  // namespace sabc
