#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sabc/core.hpp"
#include "sabc/sumstats.hpp"
#include "sabc/thermo.hpp"

namespace sabc {

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// CSV with header theta_1,...,theta_d, one particle per row.
std::string posterior_csv(const std::vector<ParameterPoint>& thetas);
std::string posterior_csv(const Ensemble& ensemble);

/// CSV with header sweep,sims,U1,U2,T1,T2,Te1,Te2,acc_rate,sigma_dot,sigma_cum,flags.
std::string trace_csv(const std::vector<ThermoState>& trace);

std::string summaries_json(const SummaryMap& map);

/// Shortest round-trip representation; "inf" for infinity.
std::string format_real(double x);

}  // namespace sabc
