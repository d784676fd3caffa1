#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "explorebench/episode.hpp"
#include "explorebench/metrics.hpp"
#include "explorebench/world_io.hpp"

namespace explorebench {

inline constexpr std::string_view kRunLogFormat = "explorebench-runlog/1";

/// First line of a run log.
struct RunLogHeader {
  Json config;  // echo of the run configuration
  std::string world_id;
  std::string world_hash;
  int r_max = 0;
  std::string model;
  std::string instruction;
  std::string agent_kind;
  std::uint64_t run_seed = 0;
  int episodes = 0;
  std::string started_at;  // empty when timestamps are disabled
};

/// One interaction. `observation` is what the agent saw before acting;
/// counters and the exploitation value are taken after the action.
struct EventRecord {
  int episode = 0;
  int step = 0;  // 1-based within the episode
  RoomId room;
  std::vector<ObjectRef> observation;
  std::vector<std::string> raw_replies;  // LLM agents only
  int invalid_count = 0;
  bool fallback = false;
  ObjectRef action;
  int reward = 0;
  int doors_used = 0;
  int balls_collected = 0;
  int exploit_return_after = 0;
};

struct EpisodeEndRecord {
  int episode = 0;
  int episode_return = 0;
  int exploit_return = 0;
  double coverage_pct = 0.0;
  Observation final_observation;
};

struct RunLogFooter {
  RunSummary summary;
  std::string finished_at;
};

struct RunLog {
  RunLogHeader header;
  std::vector<EventRecord> events;  // only events of completed episodes
  std::vector<EpisodeEndRecord> episodes;
  std::optional<RunLogFooter> footer;

  /// Byte length of the prefix ending with the last episode boundary (or
  /// the header); a resumed run continues from there.
  std::uintmax_t complete_bytes = 0;
  /// Events that followed the last completed episode and were dropped.
  std::size_t dropped_events = 0;
};

Json to_json(const RunLogHeader& header);
Json to_json(const EventRecord& event);
Json to_json(const EpisodeEndRecord& end);
Json to_json(const RunLogFooter& footer);
Json to_json(const RunSummary& summary);
RunSummary summary_from_json(const Json& j);

/// Parses a run log. With `allow_partial`, a torn last line and events of an
/// unfinished episode are tolerated (and excluded); otherwise they are
/// errors. Throws std::runtime_error on malformed content.
RunLog read_run_log(const std::filesystem::path& path, bool allow_partial = false);

/// Rebuilds the history of completed episodes.
History history_from_log(const RunLog& log);

/// Appends JSON lines and flushes after each, so a crash loses at most the
/// line being written.
class RunLogWriter {
 public:
  /// Truncates the file to `keep_bytes` (everything when 0 and not
  /// appending) before writing.
  RunLogWriter(const std::filesystem::path& path, std::optional<std::uintmax_t> keep_bytes);

  void write(const Json& record);

 private:
  std::ofstream out_;
};

/// Current UTC time as ISO 8601 with seconds.
std::string utc_timestamp();

}  // namespace explorebench
