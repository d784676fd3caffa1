#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "explorebench/episode.hpp"

namespace explorebench {

enum class InstructionId { task_oriented, soft_lower, soft_upper, custom };

std::string_view to_string(InstructionId id);
InstructionId parse_instruction_id(std::string_view text);

struct Instruction {
  InstructionId id = InstructionId::task_oriented;
  std::string text;
};

/// id -> instruction text. Defaults are compiled in; instructions.json may
/// override any of them.
class InstructionSet {
 public:
  InstructionSet();

  static InstructionSet load(const std::filesystem::path& path);

  Instruction get(InstructionId id) const;
  /// Looks up a built-in id by name; any other name must have been loaded.
  Instruction get(std::string_view name) const;
  void set(std::string name, std::string text);

  const std::map<std::string, std::string>& texts() const { return texts_; }

 private:
  std::map<std::string, std::string> texts_;
};

inline constexpr std::string_view kTaskOrientedInstruction =
    "Based the current and past trials, explore the environment to collect information that "
    "may help to become better at maximizing the reward.";
inline constexpr std::string_view kSoftLowerInstruction =
    "Strictly stick to the known rewards from your past episodes. Collect the highest rewards "
    "you have already found. Do not explore.";
inline constexpr std::string_view kSoftUpperInstruction =
    "Explore the environment. Visit states you have not visited before.";
inline constexpr std::string_view kInvalidActionNotice =
    "Invalid action. Reply with one object enclosed with < and >.";

/// How the agent came to see an observation.
enum class Arrival { episode_start, through_door, after_pickup };

/// "You see:\n<list>" at episode start, "You walk through the door. You see:
/// <list>" after a door, "You see: <list>" after a pickup.
std::string render_observation(const Observation& obs, Arrival arrival);

/// Observation lines, "> action" echoes and "Reward: r" lines of one
/// (possibly running) episode, newline-terminated.
std::string render_episode(const Trajectory& trajectory);

struct PromptBundle {
  std::string full_text;
  std::vector<ObjectRef> legal;
  int attempt = 1;
};

struct PromptSettings {
  int door_budget = 0;
  int total_episodes = 20;
};

PromptBundle render_prompt(const History& history, const Trajectory& current,
                           const Instruction& instruction, const PromptSettings& settings,
                           std::span<const ObjectRef> legal);

/// The same prompt with the invalid-action notice appended, for a retry.
PromptBundle retry_prompt(const PromptBundle& original, int attempt);

enum class ParseError { no_span, ambiguous, not_in_room };

struct ParseFailure {
  ParseError error = ParseError::no_span;
  std::string raw;
};

using ParseResult = std::variant<ObjectRef, ParseFailure>;

/// Takes the first <...> span of the reply, normalizes case and whitespace,
/// then matches "color kind" exactly, else a unique color, else a unique
/// kind among the legal objects.
ParseResult parse_action(std::string_view reply, std::span<const ObjectRef> legal);

}  // namespace explorebench
