#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "vmrp/app/config.hpp"
#include "vmrp/experiment.hpp"

namespace vmrp::app {

/// Everything persisted for one configuration.
struct SummaryDocument {
  KeyValues config;
  std::vector<TrialSummary> trials;
  ExperimentSummary aggregate;
};

/// JSON with schema "vmrp.summary/1". Missing values and NaN are null.
std::string summary_to_json(const SummaryDocument& doc);

/// Inverse of summary_to_json. Throws std::runtime_error on malformed input.
SummaryDocument summary_from_json(const std::string& text);

/// Columns: trial, iter, fes, fval, gap, kappa_BinvH, spectrum. Absent
/// diagnostics are empty fields; the spectrum is ';'-separated.
void write_trajectory_csv(std::ostream& out, const std::vector<TrialResult>& results);

/// Columns: iteration, mean_gap, min_gap, max_gap.
void write_plot_csv(std::ostream& out, const std::vector<PlotRow>& rows);

}  // namespace vmrp::app
