#include "explorebench/report.hpp"

#include <glob.h>

#include <map>
#include <set>

#include "csv.hpp"

namespace explorebench {

using detail::csv_row;
using detail::format_number;

ReportLayout parse_layout(std::string_view name) {
  if (name == "gaps_table") return ReportLayout::gaps_table;
  if (name == "stats_table") return ReportLayout::stats_table;
  if (name == "curves") return ReportLayout::curves;
  throw std::invalid_argument("unknown report layout '" + std::string(name) + "'");
}

ReportRun load_report_run(const std::filesystem::path& path) {
  RunLog log = read_run_log(path);
  if (!log.footer) throw std::runtime_error(path.string() + ": run is not finished");
  return ReportRun{std::move(log.footer->summary), std::move(log.episodes)};
}

std::vector<std::filesystem::path> expand_glob(const std::string& pattern) {
  glob_t matches{};
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &matches);
  std::vector<std::filesystem::path> out;
  if (rc == 0) {
    for (std::size_t i = 0; i < matches.gl_pathc; ++i) out.emplace_back(matches.gl_pathv[i]);
  }
  globfree(&matches);
  if (rc != 0 && rc != GLOB_NOMATCH) throw std::runtime_error("cannot expand glob '" + pattern + "'");
  return out;
}

namespace {

struct Group {
  GroupKey key;
  std::vector<const ReportRun*> runs;
  std::set<std::string> worlds;
};

std::vector<Group> group_runs(std::span<const ReportRun> runs, const ReportOptions& options) {
  if (runs.empty()) throw std::invalid_argument("report needs at least one run");
  std::map<GroupKey, Group> groups;
  for (const auto& r : runs) {
    const GroupKey key{r.summary.model, r.summary.instruction, r.summary.env_kind};
    auto& g = groups[key];
    g.key = key;
    g.runs.push_back(&r);
    g.worlds.insert(r.summary.world_id);
  }
  std::vector<Group> out;
  for (auto& [key, g] : groups) {
    if (g.worlds.size() > 1 && !options.normalize) {
      throw IncompatibleGroupError("group " + key.model + "/" + key.instruction + "/" + key.env_kind +
                                   " spans " + std::to_string(g.worlds.size()) +
                                   " worlds; pass the normalize option");
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<std::string> key_cells(const Group& g) {
  return {g.key.model, g.key.instruction, g.key.env_kind, std::to_string(g.runs.size())};
}

Stat field_stat(const Group& g, const std::string& name) {
  std::vector<double> values;
  for (const ReportRun* r : g.runs) {
    for (const auto& [field, value] : numeric_fields(r->summary)) {
      if (field == name) values.push_back(value);
    }
  }
  return mean_se(values);
}

std::string gaps_table(const std::vector<Group>& groups, const ReportOptions& options) {
  const std::string suffix = options.normalize ? "_norm" : "";
  std::vector<std::string> header{"model", "instruction", "env_kind", "runs"};
  for (const char* scope : {"last", "mean"}) {
    const std::string s = scope;
    for (const char* col : {"_total_gap", "_total_gap_se", "_explore_gap", "_explore_gap_se", "_explore_frac",
                            "_exploit_gap", "_exploit_gap_se", "_exploit_frac"}) {
      header.push_back(s + col);
    }
  }
  std::string out = csv_row(header);
  for (const auto& g : groups) {
    auto row = key_cells(g);
    for (const char* scope : {"last", "mean"}) {
      const std::string s = scope;
      const Stat total = field_stat(g, s + "_total_gap" + suffix);
      const Stat explore = field_stat(g, s + "_explore_gap" + suffix);
      const Stat exploit = field_stat(g, s + "_exploit_gap" + suffix);
      const auto [exploit_frac, explore_frac] = gap_fractions(Gaps{total.mean, exploit.mean, explore.mean});
      for (double v : {total.mean, total.se, explore.mean, explore.se, explore_frac, exploit.mean, exploit.se,
                       exploit_frac}) {
        row.push_back(format_number(v));
      }
    }
    out += csv_row(row);
  }
  return out;
}

std::string stats_table(const std::vector<Group>& groups, const ReportOptions& options) {
  const std::string suffix = options.normalize ? "_norm" : "";
  const std::vector<std::string> fields{"exploit_return_final", "agent_return_mean", "coverage_pct",
                                        "redundancy", "sample_efficiency", "invalid_actions"};
  std::vector<std::string> header{"model", "instruction", "env_kind", "runs"};
  for (const auto& f : fields) {
    header.push_back(f);
    header.push_back(f + "_se");
  }
  std::string out = csv_row(header);
  for (const auto& g : groups) {
    auto row = key_cells(g);
    for (const auto& f : fields) {
      const bool scaled = f == "exploit_return_final" || f == "agent_return_mean";
      const Stat s = field_stat(g, scaled ? f + suffix : f);
      row.push_back(format_number(s.mean));
      row.push_back(format_number(s.se));
    }
    out += csv_row(row);
  }
  return out;
}

std::string curves(const std::vector<Group>& groups, const ReportOptions& options) {
  std::string out = csv_row({"model", "instruction", "env_kind", "episode", "metric", "mean", "se", "n"});
  for (const auto& g : groups) {
    std::size_t longest = 0;
    for (const ReportRun* r : g.runs) longest = std::max(longest, r->episodes.size());
    for (std::size_t i = 0; i < longest; ++i) {
      std::map<std::string, std::vector<double>> series;
      for (const ReportRun* r : g.runs) {
        if (i >= r->episodes.size()) continue;
        const auto& e = r->episodes[i];
        const double scale = options.normalize ? (r->summary.r_max > 0 ? 1.0 / r->summary.r_max : 0.0) : 1.0;
        series["agent_return"].push_back(e.episode_return * scale);
        series["explore_gap"].push_back((r->summary.r_max - e.exploit_return) * scale);
        series["coverage_pct"].push_back(e.coverage_pct);
      }
      for (const char* metric : {"agent_return", "explore_gap", "coverage_pct"}) {
        const Stat s = mean_se(series[metric]);
        out += csv_row({g.key.model, g.key.instruction, g.key.env_kind, std::to_string(i + 1), metric,
                        format_number(s.mean), format_number(s.se), std::to_string(s.n)});
      }
    }
  }
  return out;
}

}  // namespace

std::string render_report(std::span<const ReportRun> runs, ReportLayout layout, const ReportOptions& options) {
  const auto groups = group_runs(runs, options);
  switch (layout) {
    case ReportLayout::gaps_table: return gaps_table(groups, options);
    case ReportLayout::stats_table: return stats_table(groups, options);
    case ReportLayout::curves: return curves(groups, options);
  }
  return {};
}

}  // namespace explorebench
