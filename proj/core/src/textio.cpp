#include "explorebench/textio.hpp"

#include <cctype>
#include <fstream>

#include <nlohmann/json.hpp>

namespace explorebench {

std::string_view to_string(InstructionId id) {
  switch (id) {
    case InstructionId::task_oriented: return "task_oriented";
    case InstructionId::soft_lower: return "soft_lower";
    case InstructionId::soft_upper: return "soft_upper";
    case InstructionId::custom: return "custom";
  }
  return "custom";
}

InstructionId parse_instruction_id(std::string_view text) {
  if (text == "task_oriented") return InstructionId::task_oriented;
  if (text == "soft_lower") return InstructionId::soft_lower;
  if (text == "soft_upper") return InstructionId::soft_upper;
  return InstructionId::custom;
}

InstructionSet::InstructionSet() {
  texts_["task_oriented"] = std::string(kTaskOrientedInstruction);
  texts_["soft_lower"] = std::string(kSoftLowerInstruction);
  texts_["soft_upper"] = std::string(kSoftUpperInstruction);
}

InstructionSet InstructionSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instructions file " + path.string());
  const auto j = nlohmann::json::parse(in);
  InstructionSet set;
  for (const auto& [name, text] : j.items()) set.set(name, text.get<std::string>());
  return set;
}

Instruction InstructionSet::get(InstructionId id) const { return get(to_string(id)); }

Instruction InstructionSet::get(std::string_view name) const {
  auto it = texts_.find(std::string(name));
  if (it == texts_.end()) throw std::invalid_argument("unknown instruction '" + std::string(name) + "'");
  return Instruction{parse_instruction_id(name), it->second};
}

void InstructionSet::set(std::string name, std::string text) { texts_[std::move(name)] = std::move(text); }

namespace {

std::string join_objects(const std::vector<ObjectRef>& objects) {
  std::string out;
  for (const auto& ref : objects) {
    if (!out.empty()) out += ", ";
    out += to_string(ref);
  }
  return out;
}

std::string normalize(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace

std::string render_observation(const Observation& obs, Arrival arrival) {
  switch (arrival) {
    case Arrival::episode_start: return "You see:\n" + join_objects(obs.visible);
    case Arrival::through_door: return "You walk through the door. You see: " + join_objects(obs.visible);
    case Arrival::after_pickup: return "You see: " + join_objects(obs.visible);
  }
  return {};
}

std::string render_episode(const Trajectory& trajectory) {
  const auto& events = trajectory.events;
  std::string out;
  const Observation& first = events.empty() ? trajectory.final_observation : events.front().observation;
  out += render_observation(first, Arrival::episode_start) + "\n";
  for (std::size_t k = 0; k < events.size(); ++k) {
    const auto& e = events[k];
    out += "> " + to_string(e.action) + "\n";
    out += "Reward: " + std::to_string(e.reward) + "\n";
    const Observation& next = k + 1 < events.size() ? events[k + 1].observation : trajectory.final_observation;
    const bool door = e.action.kind == ObjectKind::door;
    out += render_observation(next, door ? Arrival::through_door : Arrival::after_pickup) + "\n";
  }
  return out;
}

PromptBundle render_prompt(const History& history, const Trajectory& current,
                           const Instruction& instruction, const PromptSettings& settings,
                           std::span<const ObjectRef> legal) {
  std::string text = "Your past episodes:\n";
  for (const auto& t : history.trajectories) {
    text += "Episode " + std::to_string(t.episode_index) + ":\n";
    text += render_episode(t);
  }
  text += "\n";
  text += "You are controlling an agent in an unknown world.\n";
  text += "Over a total of " + std::to_string(settings.total_episodes) +
          " episodes, you can interact with objects in the environment.\n";
  text += instruction.text + "\n";
  text += "You have " + std::to_string(settings.door_budget) +
          " door interactions per episode but can pick up three balls, keys, or boxes.\n";
  text += "\n";
  text += "Current episode:\n";
  text += render_episode(current);
  text += "\n";
  text += "Which object do you want to interact with next?\n";
  text += "Reply with one object enclosed with < and >, e.g. <door>.\n";
  text += "\n";
  text += "What is your next action?";
  return PromptBundle{std::move(text), {legal.begin(), legal.end()}, 1};
}

PromptBundle retry_prompt(const PromptBundle& original, int attempt) {
  PromptBundle retry = original;
  retry.full_text += "\n" + std::string(kInvalidActionNotice);
  retry.attempt = attempt;
  return retry;
}

ParseResult parse_action(std::string_view reply, std::span<const ObjectRef> legal) {
  const auto open = reply.find('<');
  const auto close = open == std::string_view::npos ? open : reply.find('>', open + 1);
  if (close == std::string_view::npos) return ParseFailure{ParseError::no_span, std::string(reply)};
  const std::string span = normalize(reply.substr(open + 1, close - open - 1));

  for (const auto& ref : legal) {
    if (to_string(ref) == span) return ref;
  }
  const ObjectRef* match = nullptr;
  int matches = 0;
  for (const auto& ref : legal) {
    if (ref.color == span) {
      match = &ref;
      ++matches;
    }
  }
  if (matches == 1) return *match;
  if (matches == 0 && (span == "door" || span == "ball")) {
    const auto kind = span == "door" ? ObjectKind::door : ObjectKind::ball;
    for (const auto& ref : legal) {
      if (ref.kind == kind) {
        match = &ref;
        ++matches;
      }
    }
    if (matches == 1) return *match;
  }
  return ParseFailure{matches > 1 ? ParseError::ambiguous : ParseError::not_in_room, std::string(reply)};
}

}  // namespace explorebench
