#include "vmrp/app/serialize.hpp"

#include <cmath>
#include <json.hpp>
#include <stdexcept>

namespace vmrp::app {

namespace {

using json = nlohmann::ordered_json;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <class T>
json optional_or_null(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

template <class T>
std::optional<T> optional_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

json trial_to_json(const TrialSummary& t) {
  json j;
  j["trial"] = t.trial_index;
  j["seed"] = t.seed;
  json fes = json::array();
  for (const auto& v : t.fes_to_accuracy) fes.push_back(optional_or_null(v));
  j["fes_to_accuracy"] = fes;
  j["reached_target"] = t.reached_target;
  j["stop_reason"] = stop_reason_name(t.stop_reason);
  j["iterations"] = t.iterations;
  j["fes"] = t.fes;
  j["final_gap"] = number_or_null(t.final_gap);
  j["rejected_updates"] = t.rejected_updates;
  j["corrected_updates"] = t.corrected_updates;
  j["three_phase"] = t.three_phase;
  j["learning_phase_end"] = optional_or_null(t.learning_phase_end);
  j["wall_time"] = optional_or_null(t.wall_time);
  j["error"] = t.error.empty() ? json(nullptr) : json(t.error);
  return j;
}

TrialSummary trial_from_json(const json& j) {
  TrialSummary t;
  t.trial_index = j.at("trial").get<int>();
  t.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& v : j.at("fes_to_accuracy")) t.fes_to_accuracy.push_back(optional_from<std::int64_t>(v));
  t.reached_target = j.at("reached_target").get<bool>();
  t.stop_reason = parse_stop_reason(j.at("stop_reason").get<std::string>());
  t.iterations = j.at("iterations").get<std::int64_t>();
  t.fes = j.at("fes").get<std::int64_t>();
  t.final_gap = number_from(j.at("final_gap"));
  t.rejected_updates = j.at("rejected_updates").get<std::int64_t>();
  t.corrected_updates = j.at("corrected_updates").get<std::int64_t>();
  t.three_phase = j.at("three_phase").get<bool>();
  t.learning_phase_end = optional_from<std::int64_t>(j.at("learning_phase_end"));
  t.wall_time = optional_from<double>(j.at("wall_time"));
  if (!j.at("error").is_null()) t.error = j.at("error").get<std::string>();
  return t;
}

json aggregate_to_json(const ExperimentSummary& s) {
  json j;
  j["n"] = s.n;
  j["trials"] = s.trials;
  json decades = json::array();
  for (int d = 0; d < static_cast<int>(s.decades.size()); ++d) {
    const DecadeStats& ds = s.decades[static_cast<std::size_t>(d)];
    json e;
    e["threshold"] = decade_threshold(d);
    e["reached"] = ds.reached;
    // Statistics of FES / n^2; null when no trial reached the decade.
    e["mean"] = ds.reached ? json(ds.mean) : json(nullptr);
    e["median"] = ds.reached ? json(ds.median) : json(nullptr);
    e["min"] = ds.reached ? json(ds.min) : json(nullptr);
    e["max"] = ds.reached ? json(ds.max) : json(nullptr);
    decades.push_back(e);
  }
  j["decades"] = decades;
  j["reached_target"] = s.reached_target;
  j["mean_final_gap"] = number_or_null(s.mean_final_gap);
  j["median_final_gap"] = number_or_null(s.median_final_gap);
  j["stop_target"] = s.stop_target;
  j["stop_budget"] = s.stop_budget;
  j["stop_iterations"] = s.stop_iterations;
  j["failed"] = s.failed;
  j["three_phase"] = s.three_phase;
  j["mean_learning_phase_end"] = optional_or_null(s.mean_learning_phase_end);
  return j;
}

ExperimentSummary aggregate_from_json(const json& j) {
  ExperimentSummary s;
  s.n = j.at("n").get<int>();
  s.trials = j.at("trials").get<int>();
  for (const auto& e : j.at("decades")) {
    DecadeStats ds;
    ds.reached = e.at("reached").get<int>();
    if (ds.reached) {
      ds.mean = e.at("mean").get<double>();
      ds.median = e.at("median").get<double>();
      ds.min = e.at("min").get<double>();
      ds.max = e.at("max").get<double>();
    }
    s.decades.push_back(ds);
  }
  s.reached_target = j.at("reached_target").get<int>();
  s.mean_final_gap = number_from(j.at("mean_final_gap"));
  s.median_final_gap = number_from(j.at("median_final_gap"));
  s.stop_target = j.at("stop_target").get<int>();
  s.stop_budget = j.at("stop_budget").get<int>();
  s.stop_iterations = j.at("stop_iterations").get<int>();
  s.failed = j.at("failed").get<int>();
  s.three_phase = j.at("three_phase").get<int>();
  s.mean_learning_phase_end = optional_from<double>(j.at("mean_learning_phase_end"));
  return s;
}

void csv_number(std::ostream& out, double v) {
  if (std::isfinite(v)) out << format_double(v);
}

}  // namespace

std::string summary_to_json(const SummaryDocument& doc) {
  json j;
  j["schema"] = "vmrp.summary/1";
  json cfg = json::object();
  for (const auto& [k, v] : doc.config) cfg[k] = v;
  j["config"] = cfg;
  j["aggregate"] = aggregate_to_json(doc.aggregate);
  json trials = json::array();
  for (const auto& t : doc.trials) trials.push_back(trial_to_json(t));
  j["trials"] = trials;
  return j.dump(2) + "\n";
}

SummaryDocument summary_from_json(const std::string& text) {
  SummaryDocument doc;
  try {
    const json j = json::parse(text);
    if (j.at("schema").get<std::string>() != "vmrp.summary/1") {
      throw std::runtime_error("unsupported summary schema '" + j.at("schema").get<std::string>() + "'");
    }
    for (const auto& [k, v] : j.at("config").items()) doc.config[k] = v.get<std::string>();
    doc.aggregate = aggregate_from_json(j.at("aggregate"));
    for (const auto& t : j.at("trials")) doc.trials.push_back(trial_from_json(t));
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed summary: ") + e.what());
  }
  return doc;
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrialResult>& results) {
  out << "trial,iter,fes,fval,gap,kappa_BinvH,spectrum\n";
  for (const auto& r : results) {
    for (const auto& rec : r.trajectory.records) {
      out << r.summary.trial_index << ',' << rec.iteration << ',' << rec.fes << ',';
      csv_number(out, rec.fval);
      out << ',';
      csv_number(out, rec.gap);
      out << ',';
      csv_number(out, rec.kappa);
      out << ',';
      for (std::size_t i = 0; i < rec.spectrum.size(); ++i) {
        if (i) out << ';';
        out << format_double(rec.spectrum[i]);
      }
      out << '\n';
    }
  }
}

void write_plot_csv(std::ostream& out, const std::vector<PlotRow>& rows) {
  out << "iteration,mean_gap,min_gap,max_gap\n";
  for (const auto& r : rows) {
    out << r.iteration << ',';
    csv_number(out, r.mean_gap);
    out << ',';
    csv_number(out, r.min_gap);
    out << ',';
    csv_number(out, r.max_gap);
    out << '\n';
  }
}

}  // namespace vmrp::app
