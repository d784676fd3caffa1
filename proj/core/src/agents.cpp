#include "explorebench/agents.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>

namespace explorebench {

const ObjectRef& random_walk_choice(std::span<const ObjectRef> legal, Rng& rng) {
  if (legal.empty()) throw std::invalid_argument("random walk over an empty action set");
  return legal[static_cast<std::size_t>(rng.below(legal.size()))];
}

KnowledgeGraph current_knowledge(const DecisionContext& ctx, const WorldIndex& index) {
  KnowledgeBuilder builder(index);
  for (const auto& t : ctx.history.trajectories) builder.add_trajectory(t);
  builder.add_events(ctx.current.events, ctx.observation);
  return builder.graph();
}

void SeededPolicy::begin_episode(int episode_index) {
  rng_ = Rng(mix_seed(seed_, static_cast<std::uint64_t>(episode_index)));
}

const WorldIndex& SeededPolicy::index_for(const WorldSpec& world) {
  if (indexed_world_ != &world || !index_) {
    index_ = std::make_unique<WorldIndex>(world);
    indexed_world_ = &world;
  }
  return *index_;
}

Decision RandomWalkPolicy::decide(const DecisionContext& ctx) {
  return Decision{random_walk_choice(ctx.legal, rng()), {}};
}

namespace {

/// Doors the agent has seen, per room, from every observation so far.
std::map<RoomId, std::set<std::string>> seen_doors(const DecisionContext& ctx) {
  std::map<RoomId, std::set<std::string>> seen;
  const auto add = [&](const Observation& obs) {
    for (const auto& ref : obs.visible) {
      if (ref.kind == ObjectKind::door) seen[obs.room].insert(ref.color);
    }
  };
  for (const auto& t : ctx.history.trajectories) {
    for (const auto& e : t.events) add(e.observation);
    add(t.final_observation);
  }
  for (const auto& e : ctx.current.events) add(e.observation);
  add(ctx.observation);
  return seen;
}

}  // namespace

Decision SystematicExplorerPolicy::decide(const DecisionContext& ctx) {
  if (ctx.state.balls_collected + 1 < ctx.world.max_balls_per_episode) {
    for (const auto& ref : ctx.legal) {
      if (ref.kind == ObjectKind::ball) return Decision{ref, {}};
    }
  }

  const WorldIndex& index = index_for(ctx.world);
  const KnowledgeGraph known = current_knowledge(ctx, index);
  const auto adjacency = known_adjacency(known, index);
  const RoomId here = ctx.state.current_room;
  const auto dist = known_distances(known, index, here);
  const int remaining = ctx.world.door_budget - ctx.state.doors_used;

  // Nearest frontier by (distance, door color).
  std::optional<std::pair<int, std::string>> best;
  RoomId target = here;
  for (const auto& [room, doors] : seen_doors(ctx)) {
    const int d = dist[static_cast<std::size_t>(ctx.world.room_index(room))];
    if (d == kUnreachable || d + 1 > remaining) continue;
    for (const auto& door : doors) {
      if (known.traversed_doors.contains(door)) continue;
      std::pair<int, std::string> key{d, door};
      if (!best || key < *best) {
        best = key;
        target = room;
      }
    }
  }
  if (!best) return Decision{random_walk_choice(ctx.legal, rng()), {}};
  if (target == here) return Decision{ObjectRef{ObjectKind::door, best->second}, {}};

  // Step to the neighbor that is one door closer to the target.
  const auto to_target = known_distances(known, index, target);
  const int hops = to_target[static_cast<std::size_t>(ctx.world.room_index(here))];
  for (const auto& [color, next] : adjacency[static_cast<std::size_t>(ctx.world.room_index(here))]) {
    if (to_target[static_cast<std::size_t>(ctx.world.room_index(next))] == hops - 1) {
      return Decision{ObjectRef{ObjectKind::door, color}, {}};
    }
  }
  throw std::logic_error("systematic explorer lost its route");
}

void GreedyExploiterPolicy::begin_episode(int episode_index) {
  SeededPolicy::begin_episode(episode_index);
  planned_ = false;
  planned_value_ = 0;
  route_.clear();
  cursor_ = 0;
}

Decision GreedyExploiterPolicy::decide(const DecisionContext& ctx) {
  if (!planned_) {
    const WorldIndex& index = index_for(ctx.world);
    const KnowledgeGraph known = current_knowledge(ctx, index);
    const ExploitSolution solution = solve_knowledge(known, index);
    route_ = plan_route(known, index, solution);
    planned_value_ = solution.value;
    planned_ = true;
  }
  if (cursor_ < route_.size()) {
    const ObjectRef& next = route_[cursor_++];
    if (std::find(ctx.legal.begin(), ctx.legal.end(), next) == ctx.legal.end()) {
      throw std::logic_error("exploiter route step '" + to_string(next) + "' is not available");
    }
    return Decision{next, {}};
  }
  return Decision{after_route_door(ctx, index_for(ctx.world)), {}};
}

ObjectRef GreedyExploiterPolicy::after_route_door(const DecisionContext& ctx, const WorldIndex& index) {
  const WorldSpec& world = ctx.world;
  const int remaining = world.door_budget - ctx.state.doors_used;
  std::vector<ObjectRef> doors;
  for (const auto& ref : ctx.legal) {
    if (ref.kind == ObjectKind::door) doors.push_back(ref);
  }
  if (doors.empty()) return random_walk_choice(ctx.legal, rng());

  // can_finish[room]: some walk of exactly k known doors from room ends in a
  // known room without an uncollected ball. Built up for k = 0..remaining-1.
  const KnowledgeGraph known = current_knowledge(ctx, index);
  const auto adjacency = known_adjacency(known, index);
  const auto rooms = static_cast<std::size_t>(world.grid_dims.room_count());
  std::vector<bool> can_finish(rooms, false);
  for (RoomId room : known.visited_rooms) can_finish[static_cast<std::size_t>(world.room_index(room))] = true;
  for (const auto& color : known.observed_balls) {
    if (ctx.state.collected.contains(color)) continue;
    can_finish[static_cast<std::size_t>(world.room_index(index.ball(color)->room))] = false;
  }
  for (int k = 1; k < remaining; ++k) {
    std::vector<bool> next(rooms, false);
    for (std::size_t r = 0; r < rooms; ++r) {
      for (const auto& [color, neighbor] : adjacency[r]) {
        if (can_finish[static_cast<std::size_t>(world.room_index(neighbor))]) next[r] = true;
      }
    }
    can_finish = std::move(next);
  }
  const auto here = static_cast<std::size_t>(world.room_index(ctx.state.current_room));
  for (const auto& [color, neighbor] : adjacency[here]) {
    if (can_finish[static_cast<std::size_t>(world.room_index(neighbor))]) {
      return ObjectRef{ObjectKind::door, color};
    }
  }
  std::vector<ObjectRef> unexplored;
  for (const auto& d : doors) {
    if (!known.traversed_doors.contains(d.color)) unexplored.push_back(d);
  }
  return random_walk_choice(unexplored.empty() ? doors : unexplored, rng());
}

std::unique_ptr<Policy> make_scripted_policy(const std::string& kind, std::uint64_t seed) {
  if (kind == "random_walk") return std::make_unique<RandomWalkPolicy>(seed);
  if (kind == "systematic_explorer") return std::make_unique<SystematicExplorerPolicy>(seed);
  if (kind == "greedy_exploiter") return std::make_unique<GreedyExploiterPolicy>(seed);
  throw std::invalid_argument("unknown scripted policy kind '" + kind + "'");
}

}  // namespace explorebench
