#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sabc/cli.hpp"

using namespace sabc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("sabc_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

CliConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

const char* kSmallRun =
    "model = gauss_mean\nn_particles = 100\nsim_budget = 20000\ninit_oversample = 1000\nte_floor = 0.05\n"
    "seed = 9\nthreads = 1\n";

int run(const std::string& sub, const CliConfig& c, const fs::path& dir, std::string* out = nullptr,
        bool force = false) {
  std::ostringstream o, e;
  int status = run_command(sub, c, dir, CommandOptions{force, true}, o, e);
  if (out) *out = o.str();
  return status;
}

}  // namespace

TEST(Cli, ScheduleReferenceValue) {
  fs::path dir = scratch("schedule");
  std::string out;
  ASSERT_EQ(run("schedule", parse("model = gauss_mean\n"), dir, &out), kExitOk);
  EXPECT_EQ(out.substr(0, out.find('\n')), "u_mean,v,te");
  std::string row = out.substr(out.find('\n') + 1);
  EXPECT_EQ(row.rfind("0.5,1,", 0), 0u) << row;
  EXPECT_NEAR(std::stod(row.substr(6)), 0.392, 5e-4);
  EXPECT_EQ(slurp(dir / "schedule.csv"), out);
  EXPECT_TRUE(fs::exists(dir / "metadata.json"));
  fs::remove_all(dir);
}

TEST(Cli, RunWritesOutputs) {
  fs::path dir = scratch("run");
  ASSERT_EQ(run("run", parse(kSmallRun), dir), kExitOk);
  std::string post = slurp(dir / "posterior.csv");
  EXPECT_EQ(post.substr(0, post.find('\n')), "theta_1");
  EXPECT_EQ(std::count(post.begin(), post.end(), '\n'), 101);
  std::string trace = slurp(dir / "trace.csv");
  EXPECT_EQ(trace.substr(0, trace.find('\n')), "sweep,sims,U1,U2,T1,T2,Te1,Te2,acc_rate,sigma_dot,sigma_cum,flags");
  std::string meta = slurp(dir / "metadata.json");
  EXPECT_NE(meta.find("\"seed\": 9"), std::string::npos);
  EXPECT_NE(meta.find("\"annealer\": \"flat\""), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "error.json"));
  fs::remove_all(dir);
}

TEST(Cli, RunIsByteIdentical) {
  fs::path a = scratch("det_a"), b = scratch("det_b");
  CliConfig c = parse(kSmallRun);
  ASSERT_EQ(run("run", c, a), kExitOk);
  c.run.threads = 3;
  ASSERT_EQ(run("run", c, b), kExitOk);
  EXPECT_EQ(slurp(a / "posterior.csv"), slurp(b / "posterior.csv"));
  EXPECT_EQ(slurp(a / "trace.csv"), slurp(b / "trace.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Cli, GeneralRunWithInformativePrior) {
  fs::path dir = scratch("general");
  CliConfig c = parse(
      "model = beta_binomial\nn_particles = 100\nsim_budget = 10000\ninit_oversample = 1000\nthreads = 1\n"
      "[params]\nprior_a = 2\nprior_b = 5\n");
  int status = run("run", c, dir);
  EXPECT_TRUE(status == kExitOk || status == kExitBudget);
  EXPECT_NE(slurp(dir / "metadata.json").find("\"annealer\": \"general\""), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, NonEmptyOutputDirectoryNeedsForce) {
  fs::path dir = scratch("collide");
  CliConfig c = parse("model = gauss_mean\n");
  ASSERT_EQ(run("schedule", c, dir), kExitOk);
  EXPECT_EQ(run("schedule", c, dir), kExitConfig);
  EXPECT_EQ(run("schedule", c, dir, nullptr, true), kExitOk);
  fs::remove_all(dir);
}

TEST(Cli, BudgetExhaustedKeepsPartialResults) {
  fs::path dir = scratch("budget");
  CliConfig c = parse(
      "model = gauss_mean\nn_particles = 100\nsim_budget = 3000\ninit_oversample = 1000\nte_floor = 1e-9\n"
      "threads = 1\n");
  EXPECT_EQ(run("run", c, dir), kExitBudget);
  EXPECT_TRUE(fs::exists(dir / "posterior.csv"));
  EXPECT_NE(slurp(dir / "metadata.json").find("\"exit_status\": 4"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, RuntimeFailureWritesErrorRecord) {
  fs::path dir = scratch("runtime");
  // too few pilot draws to fit summaries for five raw outputs
  CliConfig c = parse(
      "model = gauss_mean\nn_particles = 10\ninit_oversample = 20\nsummaries = auto\nthreads = 1\n"
      "[params]\nraw_output = 1\n");
  EXPECT_EQ(run("run", c, dir), kExitRuntime);
  std::string rec = slurp(dir / "error.json");
  EXPECT_NE(rec.find("\"status\": 3"), std::string::npos) << rec;
  fs::remove_all(dir);
}

TEST(Cli, RejectAndIdeal) {
  fs::path dir = scratch("reject");
  CliConfig c = parse("model = beta_binomial\nseed = 4\n[reject]\ntolerance = 0\nn_accept = 50\n[ideal]\nn_particles = 1000\nn_steps = 1000\n");
  ASSERT_EQ(run("reject", c, dir), kExitOk);
  EXPECT_EQ(std::count_if(std::istreambuf_iterator<char>(*std::make_unique<std::ifstream>(dir / "posterior.csv")),
                          std::istreambuf_iterator<char>(), [](char ch) { return ch == '\n'; }),
            51);
  fs::path idir = scratch("ideal");
  ASSERT_EQ(run("ideal", c, idir), kExitOk);
  EXPECT_NE(slurp(idir / "metadata.json").find("loglog_slope_100_1000"), std::string::npos);
  fs::remove_all(dir);
  fs::remove_all(idir);
}

TEST(Cli, UnknownSubcommand) { EXPECT_EQ(run("fly", parse("model = gauss_mean\n"), scratch("fly")), kExitConfig); }

TEST(Cli, MainParsesArguments) {
  fs::path dir = scratch("main");
  fs::create_directories(dir);
  fs::path cfg = dir / "c.ini";
  std::ofstream(cfg) << "model = gauss_mean\nseed = 2\n";
  fs::path out = dir / "out";
  std::string a0 = "sabc", a1 = "schedule", a2 = "--config", a3 = cfg.string(), a4 = "--out", a5 = out.string(),
              a6 = "--quiet";
  char* argv[] = {a0.data(), a1.data(), a2.data(), a3.data(), a4.data(), a5.data(), a6.data()};
  std::ostringstream o, e;
  EXPECT_EQ(cli_main(7, argv, o, e), kExitOk) << e.str();
  EXPECT_TRUE(fs::exists(out / "schedule.csv"));

  ::setenv("SABC_SEED", "123", 1);
  char* argv2[] = {a0.data(), a1.data(), a2.data(), a3.data(), a4.data(), a5.data(), a6.data()};
  std::string force = "--force";
  std::vector<char*> args(argv2, argv2 + 7);
  args.push_back(force.data());
  EXPECT_EQ(cli_main(static_cast<int>(args.size()), args.data(), o, e), kExitOk);
  ::unsetenv("SABC_SEED");
  EXPECT_NE(slurp(out / "metadata.json").find("\"seed\": 123"), std::string::npos);

  std::string bad = (dir / "missing.ini").string();
  char* argv3[] = {a0.data(), a1.data(), a2.data(), bad.data(), a4.data(), a5.data()};
  EXPECT_EQ(cli_main(6, argv3, o, e), kExitConfig);
  char* argv4[] = {a0.data()};
  EXPECT_EQ(cli_main(1, argv4, o, e), kExitConfig);
  fs::remove_all(dir);
}
