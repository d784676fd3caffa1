#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "explorebench/metrics.hpp"
#include "explorebench/runlog.hpp"

namespace explorebench {

enum class ReportLayout { gaps_table, stats_table, curves };

/// Throws std::invalid_argument for unknown names.
ReportLayout parse_layout(std::string_view name);

/// What a report needs from one finished run log.
struct ReportRun {
  RunSummary summary;
  std::vector<EpisodeEndRecord> episodes;
};

/// Loads a finished log; throws std::runtime_error if it has no footer.
ReportRun load_report_run(const std::filesystem::path& path);

/// Paths matching a shell glob, sorted. Empty when nothing matches.
std::vector<std::filesystem::path> expand_glob(const std::string& pattern);

struct ReportOptions {
  /// Divide rewards and gaps by each run's r_max. Required when a group
  /// spans several worlds.
  bool normalize = false;
};

class IncompatibleGroupError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Renders a layout as CSV. gaps_table: total, exploration and exploitation
/// gaps for the last episode and the episode mean, with standard errors and
/// each part's share of the total. stats_table: exploitation return, agent
/// return, coverage, redundancy, sample efficiency and invalid actions.
/// curves: tidy per-episode series of agent return, exploration gap and
/// coverage with standard errors. Throws std::invalid_argument on an empty
/// input and IncompatibleGroupError when a group mixes worlds without
/// normalization.
std::string render_report(std::span<const ReportRun> runs, ReportLayout layout,
                          const ReportOptions& options = {});

}  // namespace explorebench
