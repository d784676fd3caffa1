#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "explorebench/episode.hpp"
#include "explorebench/llm.hpp"
#include "explorebench/metrics.hpp"
#include "explorebench/runlog.hpp"
#include "explorebench/world_io.hpp"

namespace explorebench {

/// A world given either by file or by generator parameters.
struct WorldRef {
  std::optional<std::filesystem::path> path;
  WorldKind kind = WorldKind::treasure_rooms;
  GridDims dims{5, 5};
  std::uint64_t seed = 0;
  double p_drop = 0.01;
  int n_balls = 8;
};

struct AgentSpec {
  std::string kind = "random_walk";  // random_walk | systematic_explorer | greedy_exploiter | llm
  LlmConfig llm;
  std::optional<std::filesystem::path> replay_file;  // offline replies for an llm agent
};

/// One run, or a family of runs when repeats > 1 (repeat k uses run seed
/// run_seed + k and, with vary_world_seed, world seed + k).
struct RunConfig {
  std::string name = "run";
  WorldRef world;
  AgentSpec agent;
  std::string instruction = "task_oriented";
  std::optional<std::filesystem::path> instructions_file;
  int episodes = 20;
  std::uint64_t run_seed = 0;
  std::filesystem::path output_dir = "runs";
  int repeats = 1;
  bool vary_world_seed = false;
  int parallel = 0;  // 0: one worker per run (bounded by the hardware)
  bool timestamps = true;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

/// Parses the JSON configuration document. Relative paths are resolved
/// against `base_dir`.
RunConfig parse_run_config(const Json& j, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Echo of the settings that determine a run's content (written to the log
/// header and compared on resume).
Json config_echo(const RunConfig& config);

std::vector<RunConfig> expand_repeats(const RunConfig& config);

WorldSpec resolve_world(const WorldRef& ref);

/// <output_dir>/<name>_<world_id>_<agent>_s<run_seed>.jsonl
std::filesystem::path run_log_path(const RunConfig& config, const WorldSpec& world);

/// <output_dir>/<world_id>.world.json, written by every run.
std::filesystem::path world_file_path(const RunConfig& config, const WorldSpec& world);

/// Model label used in summaries: the model name for LLM agents, otherwise
/// the agent kind.
std::string model_label(const AgentSpec& agent);

struct RunOptions {
  bool resume = false;
  /// Overrides the transport an llm agent would otherwise build.
  std::shared_ptr<ChatTransport> transport;
  /// Called after each completed episode has been written.
  std::function<void(int episode)> after_episode;
};

struct RunResult {
  std::filesystem::path log_path;
  WorldSpec world;
  History history;
  std::vector<int> exploit_per_interaction;
  RunSummary summary;
  int resumed_from = 0;  // completed episodes found on disk
};

/// Runs (or resumes) one experiment, streaming the log to disk. With
/// options.resume, a log with a footer is returned as is and a partial log
/// continues after its last completed episode. Throws TransportError when
/// an LLM endpoint fails; the log then stays resumable.
RunResult run_experiment(const RunConfig& config, const RunOptions& options = {});

/// Runs every config, `parallel` at a time (0: hardware concurrency). The
/// results are in input order. Rethrows the first failure after all runs
/// have stopped.
std::vector<RunResult> run_batch(const std::vector<RunConfig>& configs, int parallel,
                                 const RunOptions& options = {});

struct ReplayVerdict {
  bool ok = true;
  std::optional<std::size_t> event_index;  // 0-based over all logged events
  int episode = 0;
  int step = 0;
  std::string message;
};

class WorldMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Re-executes the logged actions and checks observations, rewards,
/// counters, termination, episode returns and the exploitation series.
/// Throws WorldMismatchError if the world hash differs from the header.
ReplayVerdict replay(const RunLog& log, const WorldSpec& world);

/// r_max and the exploitation series of a history, as JSON.
Json solve_report(const WorldSpec& world, const History& history);

/// summary.csv with the standard columns, one row per summary.
std::string summary_csv(std::span<const RunSummary> summaries);

}  // namespace explorebench
