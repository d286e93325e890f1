#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "sabc/core.hpp"
#include "sabc/models.hpp"

namespace sabc {

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Algorithm { automatic, flat, general };

struct RejectSettings {
  double tolerance = 0.0;
  std::size_t n_accept = 1000;
  std::uint64_t max_sims = 1000000;
};

struct IdealSettings {
  std::size_t n_particles = 100000;
  std::size_t n_steps = 1000;
};

struct ScheduleSettings {
  std::vector<double> u_mean{0.5};
  std::vector<double> v{1.0};
};

/// Everything a batch run needs, validated with defaults filled in.
struct CliConfig {
  std::string model;
  ModelParams params;
  Algorithm algorithm = Algorithm::automatic;
  RunConfig run;
  RejectSettings reject;
  IdealSettings ideal;
  ScheduleSettings schedule;
};

/// INI-style text: top-level `key = value` lines plus optional [params],
/// [reject], [ideal] and [schedule] sections. Unknown keys and duplicates are
/// rejected; all constraint violations are reported together.
CliConfig parse_config(std::istream& in);
CliConfig parse_config(const std::filesystem::path& path);

}  // namespace sabc
