#pragma once

#include <functional>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "explorebench/types.hpp"
#include "explorebench/world_index.hpp"

namespace explorebench {

/// What the agent perceives: the current room and the objects still present
/// in it, in the room's fixed generation order.
struct Observation {
  RoomId room;
  std::vector<ObjectRef> visible;

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct EpisodeState {
  std::string world_id;
  RoomId current_room;
  int doors_used = 0;
  int balls_collected = 0;
  std::set<std::string> collected;  // ball colors picked up this episode
  int episode_return = 0;
  bool done = false;
  std::string entered_via;  // door last walked through; empty at episode start

  friend bool operator==(const EpisodeState&, const EpisodeState&) = default;
};

struct Event {
  Observation observation;  // before the action
  ObjectRef action;
  int reward = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

struct Trajectory {
  int episode_index = 0;  // 1-based
  std::vector<Event> events;
  Observation final_observation;

  int episode_return() const;
  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct History {
  std::vector<Trajectory> trajectories;

  std::size_t size() const { return trajectories.size(); }
  bool empty() const { return trajectories.empty(); }
  friend bool operator==(const History&, const History&) = default;
};

class IllegalActionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StepResult {
  EpisodeState state;
  Observation observation;
  int reward = 0;
  bool done = false;
};

/// Deterministic episodic engine over one world. Transitions are pure: the
/// input state is never modified.
///
/// Only door traversals consume the door budget. Once the budget is spent
/// doors are no longer available, but the agent may still pick up the balls
/// of the room it ended in. The episode ends when three balls are collected,
/// or when the budget is spent and no ball remains in the current room.
class EpisodeEngine {
 public:
  explicit EpisodeEngine(const WorldSpec& world) : world_(&world), index_(world) {}

  const WorldSpec& world() const { return *world_; }
  const WorldIndex& index() const { return index_; }

  std::pair<EpisodeState, Observation> reset() const;
  Observation observe(const EpisodeState& state) const;

  /// Throws std::logic_error when the episode is already done.
  std::vector<ObjectRef> legal_actions(const EpisodeState& state) const;

  /// Throws IllegalActionError if `action` is not currently available.
  StepResult step(const EpisodeState& state, const ObjectRef& action) const;

 private:
  bool finished(const EpisodeState& state) const;

  const WorldSpec* world_;
  WorldIndex index_;
};

/// Appends `trajectory`, which must carry episode_index == size() + 1.
History append_history(History history, Trajectory trajectory);

/// Per-decision diagnostics a policy may attach (LLM replies, retries).
struct DecisionDiagnostics {
  std::vector<std::string> raw_replies;
  int requests = 0;
  int invalid_count = 0;
  bool fallback = false;
  double latency_ms = 0.0;
};

struct Decision {
  ObjectRef action;
  DecisionDiagnostics diagnostics;
};

/// Everything a policy may look at when choosing an action. `current` holds
/// the events of the running episode so far.
struct DecisionContext {
  const WorldSpec& world;
  const History& history;
  const Trajectory& current;
  const EpisodeState& state;
  const Observation& observation;
  std::span<const ObjectRef> legal;
  int total_episodes = 20;
};

class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string name() const = 0;
  virtual std::string kind() const = 0;

  /// Called before each episode with its 1-based index.
  virtual void begin_episode(int episode_index) { (void)episode_index; }

  virtual Decision decide(const DecisionContext& ctx) = 0;
};

/// Called after every interaction with the event just recorded, the
/// post-action state and observation, and the policy's diagnostics.
using StepObserver = std::function<void(const Event& event, const EpisodeState& after,
                                        const Observation& next,
                                        const DecisionDiagnostics& diagnostics)>;

/// Runs one full episode: reset, then query the policy and step until done.
/// Throws IllegalActionError if the policy returns an unavailable action.
Trajectory run_episode(const EpisodeEngine& engine, Policy& policy, const History& history,
                       int total_episodes = 20, const StepObserver& observer = {});

/// Reference to a ball's reward by color; 0 for doors.
int reward_of(const WorldIndex& index, const ObjectRef& ref);

}  // namespace explorebench
