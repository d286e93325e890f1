#include "sabc/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace sabc {

namespace pt = boost::property_tree;

namespace {

std::string unquote(std::string s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

class Reader {
 public:
  explicit Reader(std::vector<std::string>& problems) : problems_(problems) {}

  double real(const std::string& key, const std::string& raw) {
    std::string s = unquote(raw);
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) problems_.push_back(key + ": expected a number, got '" + s + "'");
    return v;
  }

  std::uint64_t count(const std::string& key, const std::string& raw) {
    std::string s = unquote(raw);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size()) return v;
    // exact integers in scientific notation, e.g. 5e4
    double d = 0.0;
    auto [dptr, dec] = std::from_chars(s.data(), s.data() + s.size(), d);
    if (dec == std::errc() && dptr == s.data() + s.size() && d >= 0.0 && d < 1.8e19 && d == std::floor(d))
      return static_cast<std::uint64_t>(d);
    problems_.push_back(key + ": expected a nonnegative integer, got '" + s + "'");
    return 0;
  }

  bool boolean(const std::string& key, const std::string& raw) {
    std::string s = unquote(raw);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    problems_.push_back(key + ": expected true or false, got '" + s + "'");
    return false;
  }

  std::vector<double> list(const std::string& key, const std::string& raw) {
    std::vector<double> out;
    std::stringstream ss(unquote(raw));
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
      if (b == std::string::npos) continue;
      out.push_back(real(key, item.substr(b, e - b + 1)));
    }
    if (out.empty()) problems_.push_back(key + ": expected a comma-separated list of numbers");
    return out;
  }

  void unknown(const std::string& key) { problems_.push_back("unknown key '" + key + "'"); }

 private:
  std::vector<std::string>& problems_;
};

void read_top_level(const std::string& key, const std::string& value, CliConfig& cfg, Reader& rd) {
  RunConfig& r = cfg.run;
  if (key == "model")
    cfg.model = unquote(value);
  else if (key == "algorithm") {
    std::string a = unquote(value);
    if (a == "auto")
      cfg.algorithm = Algorithm::automatic;
    else if (a == "flat")
      cfg.algorithm = Algorithm::flat;
    else if (a == "general")
      cfg.algorithm = Algorithm::general;
    else
      rd.unknown("algorithm value '" + a + "'");
  } else if (key == "n_particles")
    r.n_particles = rd.count(key, value);
  else if (key == "sim_budget")
    r.sim_budget = rd.count(key, value);
  else if (key == "v")
    r.v = rd.real(key, value);
  else if (key == "beta")
    r.beta = rd.real(key, value);
  else if (key == "s")
    r.s = rd.real(key, value);
  else if (key == "a")
    r.a = rd.real(key, value);
  else if (key == "init_oversample")
    r.init_oversample = rd.count(key, value);
  else if (key == "seed")
    r.seed = rd.count(key, value);
  else if (key == "adapt_covariance")
    r.adapt_covariance = rd.boolean(key, value);
  else if (key == "recalibration_period")
    r.recalibration_period = rd.count(key, value);
  else if (key == "te_floor")
    r.te_floor = rd.real(key, value);
  else if (key == "onsager_period")
    r.onsager_period = rd.count(key, value);
  else if (key == "n_probe")
    r.n_probe = rd.count(key, value);
  else if (key == "fixed_te")
    r.fixed_te = rd.real(key, value);
  else if (key == "threads")
    r.threads = rd.count(key, value);
  else if (key == "proposal") {
    std::string p = unquote(value);
    if (p == "gaussian")
      r.proposal = ProposalKind::gaussian;
    else if (p == "prior")
      r.proposal = ProposalKind::prior;
    else
      rd.unknown("proposal value '" + p + "'");
  } else if (key == "summaries") {
    std::string s = unquote(value);
    if (s == "auto")
      r.summaries = SummaryMode::automatic;
    else if (s == "off")
      r.summaries = SummaryMode::off;
    else
      rd.unknown("summaries value '" + s + "'");
  } else
    rd.unknown(key);
}

}  // namespace

CliConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("parse error at line " + std::to_string(e.line()) + ": " + e.message());
  }

  CliConfig cfg;
  cfg.run.threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::string> problems;
  Reader rd(problems);
  static const std::set<std::string> sections{"params", "reject", "ideal", "schedule"};

  for (const auto& [key, node] : tree) {
    if (node.empty()) {
      read_top_level(key, node.data(), cfg, rd);
      continue;
    }
    if (!sections.contains(key)) {
      rd.unknown("[" + key + "]");
      continue;
    }
    for (const auto& [sub, leaf] : node) {
      const std::string& value = leaf.data();
      const std::string name = key + "." + sub;
      if (key == "params") {
        cfg.params[sub] = rd.real(name, value);
      } else if (key == "reject") {
        if (sub == "tolerance")
          cfg.reject.tolerance = rd.real(name, value);
        else if (sub == "n_accept")
          cfg.reject.n_accept = rd.count(name, value);
        else if (sub == "max_sims")
          cfg.reject.max_sims = rd.count(name, value);
        else
          rd.unknown(name);
      } else if (key == "ideal") {
        if (sub == "n_particles")
          cfg.ideal.n_particles = rd.count(name, value);
        else if (sub == "n_steps")
          cfg.ideal.n_steps = rd.count(name, value);
        else
          rd.unknown(name);
      } else {
        if (sub == "u_mean")
          cfg.schedule.u_mean = rd.list(name, value);
        else if (sub == "v")
          cfg.schedule.v = rd.list(name, value);
        else
          rd.unknown(name);
      }
    }
  }

  if (cfg.model.empty()) problems.emplace_back("model: required");
  try {
    cfg.run.validate();
  } catch (const Error& e) {
    std::stringstream ss(e.what());
    std::string line;
    std::getline(ss, line);  // header
    while (std::getline(ss, line)) problems.push_back(line.substr(line.find_first_not_of(' ')));
  }
  if (!(cfg.reject.tolerance >= 0.0)) problems.emplace_back("reject.tolerance must be >= 0");
  if (cfg.ideal.n_particles == 0) problems.emplace_back("ideal.n_particles must be >= 1");
  for (double u : cfg.schedule.u_mean)
    if (!(u > 0.0)) problems.emplace_back("schedule.u_mean entries must be > 0");
  for (double v : cfg.schedule.v)
    if (!(v > 0.0)) problems.emplace_back("schedule.v entries must be > 0");
  if (!cfg.model.empty() && problems.empty()) {
    try {
      make_model(cfg.model, cfg.params);
    } catch (const Error& e) {
      problems.emplace_back(e.what());
    }
  }
  if (!problems.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }
  return cfg;
}

CliConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_config(in);
}

}  // namespace sabc
