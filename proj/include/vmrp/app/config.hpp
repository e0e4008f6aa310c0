#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "vmrp/experiment.hpp"

namespace vmrp::app {

using KeyValues = std::map<std::string, std::string>;

/// A configuration value that failed validation. The message names the key.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunOptions {
  ExperimentConfig experiment;
  /// identity | scaled:<value> | file:<path>
  std::string init = "identity";
  std::string out_dir = ".";
  std::string prefix = "run";
};

/// Flat "key = value" lines; '#' starts a comment. Throws ConfigError on a
/// malformed line and std::runtime_error if the file cannot be read.
KeyValues read_config_file(const std::string& path);

/// Later entries override earlier ones.
KeyValues merge(KeyValues base, const KeyValues& over);

/// Seed default from RP_SEED when set (empty map otherwise).
KeyValues environment_defaults();

/// Builds and validates options. Unknown keys and bad values throw
/// ConfigError naming the key.
RunOptions options_from_keyvalues(const KeyValues& kv);

/// Canonical key/value form with every key present.
KeyValues keyvalues_from_options(const RunOptions& opts);

/// Human label for table rows, e.g. "vrp/exact/store".
std::string config_label(const KeyValues& kv);

/// "%.17g"-equivalent shortest round-trip formatting.
std::string format_double(double v);

/// Reads an n x n whitespace-separated matrix.
Matrix read_matrix_file(const std::string& path);

}  // namespace vmrp::app
