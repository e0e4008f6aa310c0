#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "vmrp/app/config.hpp"
#include "vmrp/app/serialize.hpp"

namespace vmrp::app {

/// Process exit codes.
enum ExitCode : int { kOk = 0, kValidation = 1, kRuntime = 2, kVerifyFailed = 3 };

struct RunArtifacts {
  std::string summary;
  std::string trajectories;
  std::string plot;
};

/// Runs all trials, then writes <out>/<prefix>_summary.json,
/// <prefix>_trajectories.csv and <prefix>_plot.csv.
RunArtifacts cmd_run(const RunOptions& opts, std::ostream& log);

/// Prints the JSON report; returns kOk or kVerifyFailed.
int cmd_verify(const std::string& suite, std::uint64_t seed, std::int64_t samples, std::ostream& out);

/// Accuracy table of mean FES/n^2 per decade, re-aggregated from the stored
/// trials. A cell is "-" unless every trial reached that decade. All
/// documents must share n (ConfigError otherwise).
std::string render_table(const std::vector<SummaryDocument>& docs, bool csv);

SummaryDocument load_summary(const std::string& path);

}  // namespace vmrp::app
