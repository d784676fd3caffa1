#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "explorebench/episode.hpp"
#include "explorebench/types.hpp"

namespace explorebench {

/// Thrown when r_max >= r_exploit >= r_agent does not hold, which points at
/// an oracle or logging bug.
class OrderingError : public InvariantError {
 public:
  using InvariantError::InvariantError;
};

enum class GapScope { last_episode, mean_over_episodes };

std::string_view to_string(GapScope scope);

struct Gaps {
  double total = 0.0;
  double exploit = 0.0;
  double explore = 0.0;

  friend bool operator==(const Gaps&, const Gaps&) = default;
};

/// Share of the total gap owed to exploitation and to exploration; both 0
/// when the total gap is 0.
std::pair<double, double> gap_fractions(const Gaps& gaps);

struct GapReport {
  GapScope scope = GapScope::last_episode;
  Gaps raw;
  Gaps normalized;  // raw / r_max; 0 when r_max is 0
  double exploit_fraction = 0.0;
  double explore_fraction = 0.0;
};

/// total = r_max - r_agent, explore = r_max - r_exploit,
/// exploit = r_exploit - r_agent. Throws OrderingError unless
/// r_max >= r_exploit >= max(r_agent, 0).
GapReport decompose(double r_max, double r_exploit, double r_agent,
                    GapScope scope = GapScope::last_episode);

/// Mean of the per-episode decompositions (not the gaps of mean returns).
/// Throws std::invalid_argument on empty or mismatched series.
GapReport mean_gap_report(double r_max, std::span<const int> exploit_per_episode,
                          std::span<const int> agent_per_episode);

/// 100 * visited rooms / rooms, over the union of all episodes. The start
/// room always counts.
double coverage(const History& history, const WorldSpec& world);

/// Coverage after each episode prefix.
std::vector<double> coverage_series(const History& history, const WorldSpec& world);

/// 1 - unique (state, action) / total pairs, where a state is the room with
/// the objects currently present in it. Throws std::invalid_argument if the
/// history holds no interactions.
double redundancy(const History& history);

/// Smallest 1-based index t with series[t] >= 0.9 * max(series). Throws
/// std::invalid_argument on an empty series.
int sample_efficiency(std::span<const int> exploit_per_interaction);

struct RunSummary {
  std::string model;
  std::string instruction;
  std::string env_kind;
  std::string dims;
  std::uint64_t seed = 0;
  std::string world_id;
  int r_max = 0;
  int exploit_return_final = 0;
  double agent_return_mean = 0.0;
  int agent_return_final = 0;
  GapReport last;
  GapReport mean;
  double coverage_pct = 0.0;
  double redundancy = 0.0;
  int sample_efficiency = 0;
  int invalid_actions = 0;
  int episodes = 0;
  int interactions = 0;
};

/// Column names of summary.csv, in order.
const std::vector<std::string>& summary_columns();

/// Numeric summary fields by name. Covers the numeric summary.csv columns
/// plus values normalized by r_max ("*_norm").
std::vector<std::pair<std::string, double>> numeric_fields(const RunSummary& summary);

struct RunLabels {
  std::string model;
  std::string instruction;
  std::uint64_t seed = 0;
};

/// Computes every metric of a finished run and checks the decomposition
/// identity on both gap reports.
RunSummary summarize_run(const WorldSpec& world, const History& history,
                         std::span<const int> exploit_per_interaction, int invalid_actions,
                         const RunLabels& labels);

struct GroupKey {
  std::string model;
  std::string instruction;
  std::string env_kind;

  friend auto operator<=>(const GroupKey&, const GroupKey&) = default;
};

struct Stat {
  double mean = 0.0;
  double se = 0.0;  // sample standard deviation / sqrt(n); 0 when n == 1
  std::size_t n = 0;
};

/// Mean and standard error. Throws std::invalid_argument when empty.
Stat mean_se(std::span<const double> values);

struct GroupStats {
  GroupKey key;
  std::size_t n = 0;
  std::vector<std::string> world_ids;  // distinct, sorted
  std::vector<std::pair<std::string, Stat>> fields;

  /// Throws std::out_of_range for unknown fields.
  const Stat& field(std::string_view name) const;
  bool mixes_worlds() const { return world_ids.size() > 1; }
};

/// Groups summaries by (model, instruction, env kind) and reports mean and
/// standard error of every numeric field.
std::vector<GroupStats> aggregate(std::span<const RunSummary> summaries);

}  // namespace explorebench
