#include "sabc/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <json.hpp>
#include <ostream>
#include <set>

#include "sabc/annealer_general.hpp"
#include "sabc/baselines.hpp"
#include "sabc/output.hpp"
#include "sabc/stats.hpp"

namespace sabc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::flat: return "flat";
    case Algorithm::general: return "general";
    default: return "auto";
  }
}

json config_json(const CliConfig& c) {
  const RunConfig& r = c.run;
  json j;
  j["model"] = c.model;
  j["params"] = c.params;
  j["algorithm"] = to_string(c.algorithm);
  j["n_particles"] = r.n_particles;
  j["sim_budget"] = r.sim_budget;
  j["v"] = r.v;
  j["beta"] = r.beta;
  j["s"] = r.s;
  j["a"] = r.a;
  j["init_oversample"] = r.oversample();
  j["seed"] = r.seed;
  j["adapt_covariance"] = r.adapt_covariance;
  j["recalibration_period"] = r.recalibration_period;
  j["te_floor"] = r.te_floor;
  j["onsager_period"] = r.onsager_period;
  j["n_probe"] = r.probes();
  j["proposal"] = r.proposal == ProposalKind::prior ? "prior" : "gaussian";
  j["fixed_te"] = r.fixed_te;
  j["summaries"] = r.summaries == SummaryMode::automatic ? "auto" : "off";
  j["reject"] = {{"tolerance", format_real(c.reject.tolerance)},
                 {"n_accept", c.reject.n_accept},
                 {"max_sims", c.reject.max_sims}};
  j["ideal"] = {{"n_particles", c.ideal.n_particles}, {"n_steps", c.ideal.n_steps}};
  j["schedule"] = {{"u_mean", c.schedule.u_mean}, {"v", c.schedule.v}};
  return j;
}

json metadata(const std::string& sub, const CliConfig& c) {
  json j;
  j["tool"] = "sabc";
  j["version"] = kVersion;
  j["subcommand"] = sub;
  j["seed"] = c.run.seed;
  j["compiler"] = __VERSION__;
  j["config"] = config_json(c);
  return j;
}

void write_error(const fs::path& dir, int status, const std::string& kind, const std::string& message,
                 std::ostream& err) {
  json rec{{"status", status}, {"kind", kind}, {"message", message}};
  err << rec.dump() << '\n';
  std::error_code ec;
  if (fs::is_directory(dir, ec)) {
    try {
      write_atomic(dir / "error.json", rec.dump(2) + "\n");
    } catch (const std::exception&) {
    }
  }
}

int do_run(const CliConfig& c, const fs::path& dir, const CommandOptions& opt, std::ostream& err) {
  ModelPtr model = make_model(c.model, c.params);
  ProgressFn progress;
  if (!opt.quiet) {
    progress = [&err](const ThermoState& s) {
      if (s.sweep % 10 != 0) return;
      err << "sweep " << s.sweep << "  sims " << s.sims_used << "  T1 " << format_real(s.T1()) << "  Te1 "
          << format_real(s.Te1()) << "  acc " << format_real(s.acc_rate) << '\n';
    };
  }
  RunResult res;
  switch (c.algorithm) {
    case Algorithm::flat: res = run_flat(model, c.run, progress); break;
    case Algorithm::general: res = run_general(model, c.run, progress); break;
    default: res = run_sabc(model, c.run, progress); break;
  }
  const int status = res.reached_floor ? kExitOk : kExitBudget;
  write_atomic(dir / "posterior.csv", posterior_csv(res.ensemble));
  write_atomic(dir / "trace.csv", trace_csv(res.trace));
  if (res.summaries) write_atomic(dir / "summaries.json", summaries_json(*res.summaries));
  json meta = metadata("run", c);
  meta["annealer"] = (c.algorithm == Algorithm::general ||
                      (c.algorithm == Algorithm::automatic && model->informative_prior()))
                         ? "general"
                         : "flat";
  meta["sims_used"] = res.sims_used;
  meta["sweeps"] = res.trace.empty() ? 0 : res.trace.back().sweep;
  meta["reached_te_floor"] = res.reached_floor;
  meta["exit_status"] = status;
  write_atomic(dir / "metadata.json", meta.dump(2) + "\n");
  return status;
}

int do_reject(const CliConfig& c, const fs::path& dir) {
  ModelPtr model = make_model(c.model, c.params);
  RejectionResult res = rejection_abc(*model, c.reject.tolerance, c.reject.n_accept, c.reject.max_sims,
                                      RngStream(c.run.seed));
  write_atomic(dir / "posterior.csv", posterior_csv(res.samples));
  json meta = metadata("reject", c);
  meta["sims_used"] = res.sims;
  meta["accepted"] = res.samples.size();
  meta["acceptance_rate"] = res.acceptance_rate;
  if (!res.diagnostic.empty()) meta["diagnostic"] = res.diagnostic;
  meta["exit_status"] = kExitOk;
  write_atomic(dir / "metadata.json", meta.dump(2) + "\n");
  return kExitOk;
}

int do_ideal(const CliConfig& c, const fs::path& dir) {
  std::vector<double> means = ideal_fast_anneal(c.ideal.n_particles, c.ideal.n_steps, RngStream(c.run.seed));
  std::string csv = "step,mean_u\n";
  for (std::size_t i = 0; i < means.size(); ++i) csv += std::to_string(i) + ',' + format_real(means[i]) + '\n';
  write_atomic(dir / "ideal.csv", csv);
  json meta = metadata("ideal", c);
  if (means.size() > 1000) {
    std::vector<double> steps, vals;
    for (std::size_t t = 100; t <= 1000; ++t) {
      steps.push_back(static_cast<double>(t));
      vals.push_back(means[t]);
    }
    meta["loglog_slope_100_1000"] = loglog_slope(steps, vals);
  }
  meta["exit_status"] = kExitOk;
  write_atomic(dir / "metadata.json", meta.dump(2) + "\n");
  return kExitOk;
}

int do_schedule(const CliConfig& c, const fs::path& dir, std::ostream& out) {
  std::string csv = "u_mean,v,te\n";
  for (double u : c.schedule.u_mean)
    for (double v : c.schedule.v)
      csv += format_real(u) + ',' + format_real(v) + ',' + format_real(solve_schedule_quartic(u, v)) + '\n';
  out << csv;
  write_atomic(dir / "schedule.csv", csv);
  json meta = metadata("schedule", c);
  meta["exit_status"] = kExitOk;
  write_atomic(dir / "metadata.json", meta.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

void apply_environment(CliConfig& config) {
  if (const char* s = std::getenv("SABC_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(s, &end, 10);
    if (end == s || *end != '\0') throw ConfigError("SABC_SEED must be a nonnegative integer");
    config.run.seed = v;
  }
}

int run_command(const std::string& sub, const CliConfig& config, const fs::path& out_dir,
                const CommandOptions& options, std::ostream& out, std::ostream& err) {
  static const std::set<std::string> known{"run", "reject", "ideal", "schedule"};
  if (!known.contains(sub)) {
    write_error({}, kExitConfig, "config", "unknown subcommand '" + sub + "'", err);
    return kExitConfig;
  }
  std::error_code ec;
  if (fs::exists(out_dir, ec)) {
    if (!fs::is_directory(out_dir, ec)) {
      write_error({}, kExitConfig, "config", "output path '" + out_dir.string() + "' is not a directory", err);
      return kExitConfig;
    }
    if (!fs::is_empty(out_dir, ec) && !options.force) {
      write_error({}, kExitConfig, "config",
                  "output directory '" + out_dir.string() + "' is not empty; pass --force to overwrite", err);
      return kExitConfig;
    }
  } else {
    fs::create_directories(out_dir, ec);
    if (ec) {
      write_error({}, kExitRuntime, "io", "cannot create '" + out_dir.string() + "': " + ec.message(), err);
      return kExitRuntime;
    }
  }
  fs::remove(out_dir / "error.json", ec);

  try {
    if (sub == "run") return do_run(config, out_dir, options, err);
    if (sub == "reject") return do_reject(config, out_dir);
    if (sub == "ideal") return do_ideal(config, out_dir);
    return do_schedule(config, out_dir, out);
  } catch (const ConfigError& e) {
    write_error(out_dir, kExitConfig, "config", e.what(), err);
    return kExitConfig;
  } catch (const std::exception& e) {
    write_error(out_dir, kExitRuntime, "runtime", e.what(), err);
    return kExitRuntime;
  }
}

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulated-annealing approximate Bayesian computation"};
  app.require_subcommand(1, 1);
  std::string config_path, out_dir;
  CommandOptions options;
  std::size_t threads = 0;
  for (auto [name, help] : {std::pair{"run", "anneal an ensemble to the posterior"},
                            std::pair{"reject", "rejection ABC baseline"},
                            std::pair{"ideal", "idealized fast-annealing limit"},
                            std::pair{"schedule", "print Te over a grid of (U_mean, v)"}}) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_flag("--force", options.force, "write into a non-empty output directory");
    sub->add_option("--threads", threads, "worker threads (overrides config)")->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", options.quiet, "suppress progress output");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    write_error({}, kExitConfig, "usage", e.what(), err);
    return kExitConfig;
  }
  const std::string sub = app.get_subcommands().front()->get_name();
  CliConfig config;
  try {
    config = parse_config(fs::path(config_path));
    apply_environment(config);
    if (threads) config.run.threads = threads;
  } catch (const Error& e) {
    write_error({}, kExitConfig, "config", e.what(), err);
    return kExitConfig;
  }
  return run_command(sub, config, out_dir, options, out, err);
}

}  // namespace sabc
