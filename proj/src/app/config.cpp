#include "vmrp/app/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

namespace vmrp::app {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "function", "n", "ell", "ellpow", "i", "transform", "start", "algo", "init", "ls", "mu",
      "ls_max_fes", "sigma0", "target_p", "adapt_factor", "vertex", "update", "eps", "reuse", "m",
      "capacity", "reuse_every", "reuse_start", "update_at", "budget", "target", "max_iterations",
      "trials", "seed", "threads", "record_every", "kappa_every", "spectrum", "timing", "out", "prefix"};
  return keys;
}

double parse_double(const KeyValues& kv, const std::string& key) {
  const std::string& s = kv.at(key);
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + s + "'");
  }
}

std::int64_t parse_int(const KeyValues& kv, const std::string& key) {
  const std::string& s = kv.at(key);
  // Accept integral values written in scientific notation (1e6).
  const double v = parse_double(kv, key);
  if (v != std::floor(v) || std::abs(v) > 9.0e18) throw ConfigError(key + ": expected an integer, got '" + s + "'");
  return static_cast<std::int64_t>(v);
}

std::uint64_t parse_u64(const KeyValues& kv, const std::string& key) {
  const std::string& s = kv.at(key);
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + s + "'");
  }
  return v;
}

bool parse_bool(const KeyValues& kv, const std::string& key) {
  const std::string& s = kv.at(key);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + s + "'");
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

KeyValues read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues merge(KeyValues base, const KeyValues& over) {
  for (const auto& [k, v] : over) base[k] = v;
  return base;
}

KeyValues environment_defaults() {
  KeyValues kv;
  if (const char* s = std::getenv("RP_SEED"); s && *s) kv["seed"] = s;
  return kv;
}

Matrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read matrix file '" + path + "'");
  std::vector<double> vals;
  double v;
  while (in >> v) vals.push_back(v);
  if (!in.eof()) throw ConfigError("init: matrix file '" + path + "' contains a non-numeric entry");
  const auto n = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(vals.size()))));
  if (n == 0 || static_cast<std::size_t>(n * n) != vals.size()) {
    throw ConfigError("init: matrix file '" + path + "' is not square");
  }
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = vals[static_cast<std::size_t>(i * n + j)];
  return m;
}

RunOptions options_from_keyvalues(const KeyValues& kv) {
  for (const auto& [k, v] : kv) {
    if (!known_keys().count(k)) throw ConfigError(k + ": unknown option");
  }
  auto has = [&](const char* k) { return kv.count(k) > 0; };
  RunOptions o;
  ExperimentConfig& c = o.experiment;

  if (!has("function")) throw ConfigError("function: required");
  try {
    c.function.family = parse_family(kv.at("function"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("function: ") + e.what());
  }
  if (!has("n")) throw ConfigError("n: required");
  c.function.n = static_cast<Index>(parse_int(kv, "n"));
  if (has("ell") && has("ellpow")) throw ConfigError("ellpow: conflicts with ell");
  if (has("ell")) c.function.ell = parse_double(kv, "ell");
  if (has("ellpow")) c.function.ell = std::pow(10.0, parse_double(kv, "ellpow"));
  if (has("i")) c.function.i = static_cast<Index>(parse_int(kv, "i"));
  if (has("transform")) c.transform = parse_bool(kv, "transform");
  if (has("start")) {
    const std::string& s = kv.at("start");
    if (s == "canonical") c.start = StartPoint::canonical;
    else if (s == "som") c.start = StartPoint::som;
    else throw ConfigError("start: expected canonical or som, got '" + s + "'");
  }
  if (has("algo")) {
    try {
      c.algorithm = parse_algorithm(kv.at("algo"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("algo: ") + e.what());
    }
  }
  if (has("init")) {
    o.init = kv.at("init");
    if (o.init == "identity") {
      c.init.kind = MetricInit::Kind::identity;
    } else if (o.init.rfind("scaled:", 0) == 0) {
      c.init.kind = MetricInit::Kind::scaled;
      c.init.value = parse_double({{"init", o.init.substr(7)}}, "init");
    } else if (o.init.rfind("file:", 0) == 0) {
      c.init.kind = MetricInit::Kind::matrix;
      c.init.matrix = read_matrix_file(o.init.substr(5));
    } else {
      throw ConfigError("init: expected identity, scaled:<value> or file:<path>, got '" + o.init + "'");
    }
  }

  const std::string ls = has("ls") ? kv.at("ls") : "exact";
  if (ls == "exact") {
    ExactLineSearch e;
    if (has("vertex")) e.evaluate_vertex = parse_bool(kv, "vertex");
    c.linesearch = e;
  } else if (ls == "es") {
    AdaptiveEsLineSearch e;
    if (has("sigma0")) e.initial.sigma = parse_double(kv, "sigma0");
    if (has("target_p")) e.initial.target_p = parse_double(kv, "target_p");
    if (has("adapt_factor")) e.initial.adapt_factor = parse_double(kv, "adapt_factor");
    c.linesearch = e;
  } else if (ls == "bisection") {
    BisectionLineSearch b;
    if (has("mu")) b.mu = parse_double(kv, "mu");
    if (has("ls_max_fes")) b.max_fes = parse_int(kv, "ls_max_fes");
    c.linesearch = b;
  } else {
    throw ConfigError("ls: expected exact, es or bisection, got '" + ls + "'");
  }

  if (has("update")) {
    try {
      c.update.scheme = parse_update_scheme(kv.at("update"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("update: ") + e.what());
    }
  }
  c.update.eps = has("eps") ? parse_double(kv, "eps") : default_eps(c.function.family);
  if (has("reuse")) c.update.reuse = parse_bool(kv, "reuse");
  if (has("m")) c.update.m = static_cast<int>(parse_int(kv, "m"));
  if (has("capacity")) c.update.capacity = parse_int(kv, "capacity");
  if (has("reuse_every")) c.update.reuse_every = parse_int(kv, "reuse_every");
  if (has("reuse_start")) c.update.reuse_start = parse_int(kv, "reuse_start");
  if (has("update_at")) {
    try {
      c.update.update_at = parse_update_at(kv.at("update_at"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("update_at: ") + e.what());
    }
  }

  if (has("budget")) c.budget_fes = parse_int(kv, "budget");
  if (has("target")) c.target_gap = parse_double(kv, "target");
  if (has("max_iterations")) c.max_iterations = parse_int(kv, "max_iterations");
  if (has("trials")) c.trials = static_cast<int>(parse_int(kv, "trials"));
  if (has("seed")) c.seed = parse_u64(kv, "seed");
  if (has("threads")) c.threads = static_cast<int>(parse_int(kv, "threads"));
  if (has("record_every")) c.record.every = parse_int(kv, "record_every");
  if (has("kappa_every")) c.record.kappa_every = parse_int(kv, "kappa_every");
  if (has("spectrum")) c.record.spectrum = parse_bool(kv, "spectrum");
  if (has("timing")) c.timing = parse_bool(kv, "timing");
  if (has("out")) o.out_dir = kv.at("out");
  if (has("prefix")) o.prefix = kv.at("prefix");
  if (o.prefix.empty()) throw ConfigError("prefix: must not be empty");

  try {
    c.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return o;
}

KeyValues keyvalues_from_options(const RunOptions& o) {
  const ExperimentConfig& c = o.experiment;
  KeyValues kv;
  kv["function"] = family_name(c.function.family);
  kv["n"] = std::to_string(c.function.n);
  kv["ell"] = format_double(c.function.ell);
  kv["i"] = std::to_string(c.function.i);
  kv["transform"] = c.transform ? "true" : "false";
  kv["start"] = c.start == StartPoint::som ? "som" : "canonical";
  kv["algo"] = algorithm_name(c.algorithm);
  kv["init"] = o.init;
  if (const auto* e = std::get_if<ExactLineSearch>(&c.linesearch)) {
    kv["ls"] = "exact";
    kv["vertex"] = e->evaluate_vertex ? "true" : "false";
  } else if (const auto* e = std::get_if<AdaptiveEsLineSearch>(&c.linesearch)) {
    kv["ls"] = "es";
    kv["sigma0"] = format_double(e->initial.sigma);
    kv["target_p"] = format_double(e->initial.target_p);
    kv["adapt_factor"] = format_double(e->initial.adapt_factor);
  } else {
    const auto& b = std::get<BisectionLineSearch>(c.linesearch);
    kv["ls"] = "bisection";
    kv["mu"] = format_double(b.mu);
    kv["ls_max_fes"] = std::to_string(b.max_fes);
  }
  kv["update"] = update_scheme_name(c.update.scheme);
  kv["eps"] = format_double(c.update.eps);
  kv["reuse"] = c.update.reuse ? "true" : "false";
  kv["m"] = std::to_string(c.update.m);
  kv["capacity"] = std::to_string(c.update.capacity);
  kv["reuse_every"] = std::to_string(c.update.reuse_every);
  kv["reuse_start"] = std::to_string(c.update.reuse_start);
  kv["update_at"] = update_at_name(c.update.update_at);
  kv["budget"] = std::to_string(c.effective_budget());
  kv["target"] = format_double(c.target_gap);
  kv["max_iterations"] = std::to_string(c.max_iterations);
  kv["trials"] = std::to_string(c.trials);
  kv["seed"] = std::to_string(c.seed);
  kv["threads"] = std::to_string(c.threads);
  kv["record_every"] = std::to_string(c.record.every);
  kv["kappa_every"] = std::to_string(c.record.kappa_every);
  kv["spectrum"] = c.record.spectrum ? "true" : "false";
  kv["timing"] = c.timing ? "true" : "false";
  kv["out"] = o.out_dir;
  kv["prefix"] = o.prefix;
  return kv;
}

std::string config_label(const KeyValues& kv) {
  auto get = [&](const char* k) {
    const auto it = kv.find(k);
    return it == kv.end() ? std::string("?") : it->second;
  };
  std::string label = get("function");
  if (label == "g") label += get("i");
  label += " " + get("algo") + "/" + get("ls");
  if (get("algo") == "vrp") label += "/" + get("update");
  return label;
}

}  // namespace vmrp::app
