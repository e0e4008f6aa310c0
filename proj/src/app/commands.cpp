#include "vmrp/app/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vmrp/app/verify.hpp"

namespace vmrp::app {

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string decade_label(int d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "1e%+d", kDecadeHigh - d);
  return buf;
}

}  // namespace

RunArtifacts cmd_run(const RunOptions& opts, std::ostream& log) {
  const ExperimentConfig& c = opts.experiment;
  const std::vector<TrialResult> results = run_experiment(c);

  SummaryDocument doc;
  doc.config = keyvalues_from_options(opts);
  for (const auto& r : results) doc.trials.push_back(r.summary);
  doc.aggregate = aggregate(doc.trials, c.function.n);

  std::ostringstream traj, plot;
  write_trajectory_csv(traj, results);
  write_plot_csv(plot, plot_data(results));

  const std::filesystem::path dir(opts.out_dir);
  std::filesystem::create_directories(dir);
  RunArtifacts a;
  a.summary = (dir / (opts.prefix + "_summary.json")).string();
  a.trajectories = (dir / (opts.prefix + "_trajectories.csv")).string();
  a.plot = (dir / (opts.prefix + "_plot.csv")).string();
  write_file(a.summary, summary_to_json(doc));
  write_file(a.trajectories, traj.str());
  write_file(a.plot, plot.str());

  const ExperimentSummary& s = doc.aggregate;
  log << config_label(doc.config) << " n=" << s.n << ": " << s.reached_target << "/" << s.trials
      << " trials reached the target";
  if (s.failed) log << ", " << s.failed << " failed";
  log << "\n";
  for (const auto& t : doc.trials) {
    if (!t.error.empty()) log << "  trial " << t.trial_index << ": " << t.error << "\n";
  }
  return a;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, std::int64_t samples, std::ostream& out) {
  const VerifyReport r = run_suite(suite, seed, samples);
  out << report_to_json(r);
  return r.passed() ? kOk : kVerifyFailed;
}

SummaryDocument load_summary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return summary_from_json(ss.str());
}

std::string render_table(const std::vector<SummaryDocument>& docs, bool csv) {
  if (docs.empty()) throw ConfigError("table: no summaries given");
  const int n = docs.front().aggregate.n;
  for (const auto& d : docs) {
    if (d.aggregate.n != n) throw ConfigError("table: summaries have different n");
  }
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"config"};
  for (int d = 0; d < kDecadeCount; ++d) header.push_back(decade_label(d));
  rows.push_back(header);
  for (const auto& doc : docs) {
    const ExperimentSummary s = aggregate(doc.trials, n);
    std::vector<std::string> row{config_label(doc.config)};
    for (const auto& ds : s.decades) {
      if (ds.reached < s.trials || s.trials == 0) {
        row.push_back("-");
      } else {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", ds.mean);
        row.push_back(buf);
      }
    }
    rows.push_back(row);
  }

  std::ostringstream out;
  if (csv) {
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
      out << "\n";
    }
    return out.str();
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  out << "n = " << n << ", mean FES / n^2 to reach each accuracy\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      const std::string pad(width[i] - row[i].size(), ' ');
      out << (i ? "  " : "") << (i ? pad + row[i] : row[i] + pad);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace vmrp::app
