#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "vmrp/app/commands.hpp"

namespace {

using namespace vmrp::app;

// Flags accepted by `run`, one per config key.
const char* const kRunKeys[] = {
    "function", "n", "ell", "ellpow", "i", "transform", "start", "algo", "init", "ls", "mu",
    "ls_max_fes", "sigma0", "target_p", "adapt_factor", "vertex", "update", "eps", "reuse", "m",
    "capacity", "reuse_every", "reuse_start", "update_at", "budget", "target", "max_iterations",
    "trials", "seed", "threads", "record_every", "kappa_every", "spectrum", "timing", "out", "prefix"};

std::uint64_t default_seed() {
  if (const char* s = std::getenv("RP_SEED"); s && *s) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw ConfigError(std::string("RP_SEED: expected a non-negative integer, got '") + s + "'");
    }
  }
  return 1;
}

std::int64_t parse_count(const std::string& key, const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() || v < 0 || v != std::floor(v)) throw std::invalid_argument("");
    return static_cast<std::int64_t>(v);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + s + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto p = s.find(sep, start);
    out.push_back(s.substr(start, p - start));
    if (p == std::string::npos) return out;
    start = p + 1;
  }
}

int run_main(int argc, char** argv) {
  CLI::App app{"Random pursuit with variable metric: experiments, verification and tables"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run seeded trials and write trajectory, summary and plot files");
  std::string config_path;
  run->add_option("--config", config_path, "Flat key = value file; flags override it");
  std::map<std::string, std::string> flags;
  for (const char* key : kRunKeys) {
    run->add_option_function<std::string>(std::string("--") + key,
                                          [&flags, key](const std::string& v) { flags[key] = v; });
  }
  std::string sweep;
  run->add_option("--sweep", sweep, "key=v1,v2,... runs one configuration per value");

  auto* verify = app.add_subcommand("verify", "Check theory against closed forms and simulation");
  std::string suite = "all";
  std::optional<std::uint64_t> verify_seed;
  std::string samples = "0";
  std::string verify_out;
  verify->add_option("suite", suite, "moments | rhe-exact | diag | pd | propagation | all");
  verify->add_option("--seed", verify_seed, "RNG seed (default: RP_SEED or 1)");
  verify->add_option("--samples", samples, "Monte-Carlo sample count (0: suite defaults)");
  verify->add_option("--out", verify_out, "Write the JSON report here instead of stdout");

  auto* table = app.add_subcommand("table", "Accuracy table from summary files");
  std::vector<std::string> inputs;
  std::string format = "text";
  table->add_option("inputs", inputs, "Summary JSON files")->required();
  table->add_option("--format", format, "text | csv")->check(CLI::IsMember({"text", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    if (*run) {
      KeyValues kv = environment_defaults();
      if (!config_path.empty()) kv = merge(kv, read_config_file(config_path));
      kv = merge(kv, KeyValues(flags.begin(), flags.end()));
      if (sweep.empty()) {
        cmd_run(options_from_keyvalues(kv), std::cerr);
        return kOk;
      }
      const auto eq = sweep.find('=');
      if (eq == std::string::npos) throw ConfigError("sweep: expected key=v1,v2,...");
      const std::string key = sweep.substr(0, eq);
      const std::string base_prefix = kv.count("prefix") ? kv["prefix"] : "run";
      // Validate every point before running any of them.
      std::vector<RunOptions> points;
      for (const auto& value : split(sweep.substr(eq + 1), ',')) {
        KeyValues point = kv;
        point[key] = value;
        point["prefix"] = base_prefix + "_" + key + value;
        points.push_back(options_from_keyvalues(point));
      }
      for (const auto& p : points) cmd_run(p, std::cerr);
      return kOk;
    }
    if (*verify) {
      const std::uint64_t seed = verify_seed ? *verify_seed : default_seed();
      const std::int64_t n_samples = parse_count("samples", samples);
      if (verify_out.empty()) return cmd_verify(suite, seed, n_samples, std::cout);
      std::ofstream out(verify_out);
      if (!out) throw std::runtime_error("cannot write '" + verify_out + "'");
      return cmd_verify(suite, seed, n_samples, out);
    }
    if (*table) {
      std::vector<SummaryDocument> docs;
      for (const auto& path : inputs) docs.push_back(load_summary(path));
      std::cout << render_table(docs, format == "csv");
      return kOk;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) { return run_main(argc, argv); }
