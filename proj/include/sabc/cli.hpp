#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "sabc/config.hpp"

namespace sabc {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitRuntime = 3,
  kExitBudget = 4,  // budget exhausted before te_floor; partial results written
};

struct CommandOptions {
  bool force = false;
  bool quiet = false;
};

inline constexpr const char* kVersion = "1.0.0";

/// Executes `run`, `reject`, `ideal` or `schedule` and writes its outputs into
/// `out_dir`. Failures produce an error.json record and a nonzero status.
int run_command(const std::string& subcommand, const CliConfig& config, const std::filesystem::path& out_dir,
                const CommandOptions& options, std::ostream& out, std::ostream& err);

/// Applies SABC_SEED from the environment, if set.
void apply_environment(CliConfig& config);

/// Full command-line entry point: sabc <subcommand> --config <path> --out <dir>.
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace sabc
