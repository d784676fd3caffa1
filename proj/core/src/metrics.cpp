#include "explorebench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "explorebench/oracle.hpp"

namespace explorebench {

namespace {

constexpr double kTolerance = 1e-9;

}  // namespace

std::string_view to_string(GapScope scope) {
  return scope == GapScope::last_episode ? "last_episode" : "mean_over_episodes";
}

std::pair<double, double> gap_fractions(const Gaps& gaps) {
  if (gaps.total <= 0.0) return {0.0, 0.0};
  return {gaps.exploit / gaps.total, gaps.explore / gaps.total};
}

GapReport decompose(double r_max, double r_exploit, double r_agent, GapScope scope) {
  if (r_exploit < -kTolerance || r_agent < -kTolerance) {
    throw OrderingError("returns must be non-negative");
  }
  if (r_max + kTolerance < r_exploit) {
    throw OrderingError("r_max " + std::to_string(r_max) + " below r_exploit " + std::to_string(r_exploit));
  }
  if (r_exploit + kTolerance < r_agent) {
    throw OrderingError("r_exploit " + std::to_string(r_exploit) + " below r_agent " +
                        std::to_string(r_agent));
  }
  GapReport report;
  report.scope = scope;
  report.raw = Gaps{r_max - r_agent, r_exploit - r_agent, r_max - r_exploit};
  if (r_max > 0.0) {
    report.normalized = Gaps{report.raw.total / r_max, report.raw.exploit / r_max,
                             report.raw.explore / r_max};
  }
  std::tie(report.exploit_fraction, report.explore_fraction) = gap_fractions(report.raw);
  return report;
}

GapReport mean_gap_report(double r_max, std::span<const int> exploit_per_episode,
                          std::span<const int> agent_per_episode) {
  if (exploit_per_episode.empty()) throw std::invalid_argument("mean gaps need at least one episode");
  if (exploit_per_episode.size() != agent_per_episode.size()) {
    throw std::invalid_argument("exploit and agent series differ in length");
  }
  GapReport mean;
  mean.scope = GapScope::mean_over_episodes;
  for (std::size_t i = 0; i < exploit_per_episode.size(); ++i) {
    const GapReport r = decompose(r_max, exploit_per_episode[i], agent_per_episode[i]);
    mean.raw.total += r.raw.total;
    mean.raw.exploit += r.raw.exploit;
    mean.raw.explore += r.raw.explore;
    mean.normalized.total += r.normalized.total;
    mean.normalized.exploit += r.normalized.exploit;
    mean.normalized.explore += r.normalized.explore;
  }
  const auto n = static_cast<double>(exploit_per_episode.size());
  for (Gaps* g : {&mean.raw, &mean.normalized}) {
    g->total /= n;
    g->exploit /= n;
    g->explore /= n;
  }
  std::tie(mean.exploit_fraction, mean.explore_fraction) = gap_fractions(mean.raw);
  return mean;
}

double coverage(const History& history, const WorldSpec& world) {
  const WorldIndex index(world);
  const KnowledgeGraph graph = build_graph(history, index);
  return 100.0 * static_cast<double>(graph.visited_rooms.size()) /
         static_cast<double>(world.rooms.size());
}

std::vector<double> coverage_series(const History& history, const WorldSpec& world) {
  const WorldIndex index(world);
  KnowledgeBuilder builder(index);
  std::vector<double> series;
  for (const auto& t : history.trajectories) {
    builder.add_trajectory(t);
    series.push_back(100.0 * static_cast<double>(builder.graph().visited_rooms.size()) /
                     static_cast<double>(world.rooms.size()));
  }
  return series;
}

double redundancy(const History& history) {
  std::set<std::string> unique;
  std::size_t total = 0;
  for (const auto& t : history.trajectories) {
    for (const auto& e : t.events) {
      std::vector<std::string> present;
      for (const auto& ref : e.observation.visible) present.push_back(to_string(ref));
      std::sort(present.begin(), present.end());
      std::string key = to_string(e.observation.room);
      for (const auto& p : present) key += "|" + p;
      key += "#" + to_string(e.action);
      unique.insert(std::move(key));
      ++total;
    }
  }
  if (total == 0) throw std::invalid_argument("redundancy of a history without interactions");
  return 1.0 - static_cast<double>(unique.size()) / static_cast<double>(total);
}

int sample_efficiency(std::span<const int> exploit_per_interaction) {
  if (exploit_per_interaction.empty()) throw std::invalid_argument("sample efficiency of an empty series");
  const int best = *std::max_element(exploit_per_interaction.begin(), exploit_per_interaction.end());
  const double threshold = 0.9 * best;
  for (std::size_t t = 0; t < exploit_per_interaction.size(); ++t) {
    if (exploit_per_interaction[t] >= threshold) return static_cast<int>(t) + 1;
  }
  return static_cast<int>(exploit_per_interaction.size());
}

const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> columns{
      "model",           "instruction",       "env_kind",         "dims",
      "seed",            "r_max",             "exploit_return_final", "agent_return_mean",
      "agent_return_final", "last_total_gap", "last_exploit_gap", "last_explore_gap",
      "mean_total_gap",  "mean_exploit_gap",  "mean_explore_gap", "coverage_pct",
      "redundancy",      "sample_efficiency", "invalid_actions",  "episodes",
      "interactions"};
  return columns;
}

std::vector<std::pair<std::string, double>> numeric_fields(const RunSummary& s) {
  return {
      {"r_max", s.r_max},
      {"exploit_return_final", s.exploit_return_final},
      {"agent_return_mean", s.agent_return_mean},
      {"agent_return_final", s.agent_return_final},
      {"last_total_gap", s.last.raw.total},
      {"last_exploit_gap", s.last.raw.exploit},
      {"last_explore_gap", s.last.raw.explore},
      {"mean_total_gap", s.mean.raw.total},
      {"mean_exploit_gap", s.mean.raw.exploit},
      {"mean_explore_gap", s.mean.raw.explore},
      {"coverage_pct", s.coverage_pct},
      {"redundancy", s.redundancy},
      {"sample_efficiency", s.sample_efficiency},
      {"invalid_actions", s.invalid_actions},
      {"episodes", s.episodes},
      {"interactions", s.interactions},
      {"last_total_gap_norm", s.last.normalized.total},
      {"last_exploit_gap_norm", s.last.normalized.exploit},
      {"last_explore_gap_norm", s.last.normalized.explore},
      {"mean_total_gap_norm", s.mean.normalized.total},
      {"mean_exploit_gap_norm", s.mean.normalized.exploit},
      {"mean_explore_gap_norm", s.mean.normalized.explore},
      {"exploit_return_final_norm", s.r_max > 0 ? s.exploit_return_final / double(s.r_max) : 0.0},
      {"agent_return_mean_norm", s.r_max > 0 ? s.agent_return_mean / s.r_max : 0.0},
  };
}

namespace {

void check_identity(const GapReport& report) {
  for (const Gaps* g : {&report.raw, &report.normalized}) {
    if (std::abs(g->total - (g->exploit + g->explore)) > 1e-12) {
      throw InvariantError("gap decomposition identity violated");
    }
  }
}

}  // namespace

RunSummary summarize_run(const WorldSpec& world, const History& history,
                         std::span<const int> exploit_per_interaction, int invalid_actions,
                         const RunLabels& labels) {
  if (history.empty()) throw std::invalid_argument("cannot summarize a run without episodes");
  const WorldIndex index(world);
  const auto exploit = exploit_series(history, index, Granularity::per_episode);
  std::vector<int> agent;
  int interactions = 0;
  for (const auto& t : history.trajectories) {
    agent.push_back(t.episode_return());
    interactions += static_cast<int>(t.events.size());
  }

  RunSummary s;
  s.model = labels.model;
  s.instruction = labels.instruction;
  s.env_kind = std::string(to_string(world.kind));
  s.dims = to_string(world.grid_dims);
  s.seed = labels.seed;
  s.world_id = world.world_id;
  s.r_max = world.r_max;
  s.exploit_return_final = exploit.back();
  s.agent_return_final = agent.back();
  double sum = 0.0;
  for (int a : agent) sum += a;
  s.agent_return_mean = sum / static_cast<double>(agent.size());
  s.last = decompose(world.r_max, exploit.back(), agent.back(), GapScope::last_episode);
  s.mean = mean_gap_report(world.r_max, exploit, agent);
  check_identity(s.last);
  check_identity(s.mean);
  s.coverage_pct = coverage(history, world);
  s.redundancy = interactions > 0 ? redundancy(history) : 0.0;
  s.sample_efficiency = exploit_per_interaction.empty() ? 0 : sample_efficiency(exploit_per_interaction);
  s.invalid_actions = invalid_actions;
  s.episodes = static_cast<int>(history.size());
  s.interactions = interactions;
  return s;
}

Stat mean_se(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("statistics of an empty group");
  Stat stat;
  stat.n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  stat.mean = sum / static_cast<double>(stat.n);
  if (stat.n > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - stat.mean) * (v - stat.mean);
    const double sd = std::sqrt(sq / static_cast<double>(stat.n - 1));
    stat.se = sd / std::sqrt(static_cast<double>(stat.n));
  }
  return stat;
}

const Stat& GroupStats::field(std::string_view name) const {
  for (const auto& [field_name, stat] : fields) {
    if (field_name == name) return stat;
  }
  throw std::out_of_range("unknown summary field '" + std::string(name) + "'");
}

std::vector<GroupStats> aggregate(std::span<const RunSummary> summaries) {
  std::map<GroupKey, std::vector<const RunSummary*>> groups;
  for (const auto& s : summaries) groups[GroupKey{s.model, s.instruction, s.env_kind}].push_back(&s);
  std::vector<GroupStats> out;
  for (const auto& [key, members] : groups) {
    GroupStats g;
    g.key = key;
    g.n = members.size();
    std::set<std::string> worlds;
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
    for (const RunSummary* s : members) {
      worlds.insert(s->world_id);
      const auto fields = numeric_fields(*s);
      if (columns.empty()) {
        for (const auto& [name, value] : fields) names.push_back(name);
        columns.resize(fields.size());
      }
      for (std::size_t k = 0; k < fields.size(); ++k) columns[k].push_back(fields[k].second);
    }
    g.world_ids.assign(worlds.begin(), worlds.end());
    for (std::size_t k = 0; k < names.size(); ++k) g.fields.emplace_back(names[k], mean_se(columns[k]));
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace explorebench
