#pragma once

#include <limits>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "explorebench/episode.hpp"
#include "explorebench/types.hpp"
#include "explorebench/world_index.hpp"

namespace explorebench {

/// The exploitable part of a history: rooms seen, doors actually walked
/// through, and balls observed (pickup not required). Doors and balls are
/// identified by their unique color.
struct KnowledgeGraph {
  RoomId start;
  std::set<RoomId> visited_rooms;
  std::set<std::string> traversed_doors;
  std::set<std::string> observed_balls;

  friend bool operator==(const KnowledgeGraph&, const KnowledgeGraph&) = default;
};

/// Incrementally folds observations and actions into a KnowledgeGraph,
/// validating each against the world.
class KnowledgeBuilder {
 public:
  explicit KnowledgeBuilder(const WorldIndex& index);

  void observe(const Observation& obs);
  /// Records an action taken from `room` that left the agent in `next_room`,
  /// which must be the door's far side for a door and `room` for a ball.
  void act(RoomId room, const ObjectRef& action, RoomId next_room);
  /// Events of one episode followed by the observation after the last one.
  void add_events(std::span<const Event> events, const Observation& after);
  void add_trajectory(const Trajectory& trajectory);

  const KnowledgeGraph& graph() const { return graph_; }

 private:
  const WorldIndex* index_;
  KnowledgeGraph graph_;
};

/// Thrown when a history references rooms or objects inconsistently with
/// the world.
class InconsistentHistoryError : public InvariantError {
 public:
  using InvariantError::InvariantError;
};

KnowledgeGraph build_graph(const History& history, const WorldIndex& index);

/// Knowledge of a fully revealed world.
KnowledgeGraph full_knowledge(const WorldSpec& world);

inline constexpr int kUnreachable = std::numeric_limits<int>::max() / 4;

/// Budgeted orienteering over {start} + known balls. Node 0 is the start;
/// nodes 1.. are balls sorted by color.
struct OrienteeringInstance {
  std::vector<std::string> labels;  // labels[0] is the start room id
  std::vector<int> prizes;          // prizes[0] == 0
  std::vector<RoomId> node_rooms;
  std::vector<std::vector<int>> cost;  // door traversals; kUnreachable if none
  int budget = 0;
  int ball_cap = kMaxBallsPerEpisode;

  std::size_t size() const { return labels.size(); }
};

struct ExploitSolution {
  int value = 0;
  std::vector<std::string> path;  // ball colors in pickup order
  int cost_used = 0;

  friend bool operator==(const ExploitSolution&, const ExploitSolution&) = default;
};

/// Adjacency of the known map: for each room, (door color, neighbor) pairs
/// over traversed doors, sorted by color.
std::vector<std::vector<std::pair<std::string, RoomId>>> known_adjacency(
    const KnowledgeGraph& graph, const WorldIndex& index);

/// BFS door-distances from `from` over traversed doors; kUnreachable for
/// rooms not connected through known doors. Indexed by room_index.
std::vector<int> known_distances(const KnowledgeGraph& graph, const WorldIndex& index,
                                 RoomId from);

/// Builds the instance: pairwise shortest paths over traversed doors.
OrienteeringInstance shortest_costs(const KnowledgeGraph& graph, const WorldIndex& index);

/// Exact optimum over all ordered selections of at most ball_cap balls whose
/// chained path cost fits the budget. Among optimal selections, returns the
/// lexicographically smallest color sequence.
ExploitSolution solve_orienteering(const OrienteeringInstance& instance);

/// R^exploit of a knowledge graph.
ExploitSolution solve_knowledge(const KnowledgeGraph& graph, const WorldIndex& index);

/// R^max: the optimum on the fully revealed world.
int compute_r_max(const WorldSpec& world);

/// Expands a solution into concrete actions: shortest known-door routes
/// (ties broken by door color) interleaved with ball pickups.
std::vector<ObjectRef> plan_route(const KnowledgeGraph& graph, const WorldIndex& index,
                                  const ExploitSolution& solution);

enum class Granularity { per_episode, per_interaction };

/// R^exploit after each episode or after each interaction. The per-interaction
/// knowledge after step k includes the observation that followed it.
std::vector<int> exploit_series(const History& history, const WorldIndex& index,
                                Granularity granularity);

}  // namespace explorebench
