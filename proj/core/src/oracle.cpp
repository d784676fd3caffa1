#include "explorebench/oracle.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>

namespace explorebench {

KnowledgeBuilder::KnowledgeBuilder(const WorldIndex& index) : index_(&index) {
  graph_.start = index.world().start_room;
  graph_.visited_rooms.insert(graph_.start);
}

void KnowledgeBuilder::observe(const Observation& obs) {
  if (!index_->world().contains(obs.room)) {
    throw InconsistentHistoryError("observation of unknown room " + to_string(obs.room));
  }
  graph_.visited_rooms.insert(obs.room);
  for (const auto& ref : obs.visible) {
    if (!index_->located_in(ref, obs.room)) {
      throw InconsistentHistoryError("'" + to_string(ref) + "' is not located in room " +
                                     to_string(obs.room));
    }
    if (ref.kind == ObjectKind::ball) graph_.observed_balls.insert(ref.color);
  }
}

void KnowledgeBuilder::act(RoomId room, const ObjectRef& action, RoomId next_room) {
  if (!index_->located_in(action, room)) {
    throw InconsistentHistoryError("action '" + to_string(action) + "' taken outside its room " +
                                   to_string(room));
  }
  if (action.kind == ObjectKind::ball) {
    if (next_room != room) throw InconsistentHistoryError("ball pickup changed the room");
    graph_.observed_balls.insert(action.color);
    return;
  }
  const RoomId beyond = index_->door(action.color)->other_side(room);
  if (next_room != beyond) {
    throw InconsistentHistoryError("door " + action.color + " does not lead to " + to_string(next_room));
  }
  graph_.traversed_doors.insert(action.color);
  graph_.visited_rooms.insert(beyond);
}

void KnowledgeBuilder::add_events(std::span<const Event> events, const Observation& after) {
  for (std::size_t k = 0; k < events.size(); ++k) {
    const auto& e = events[k];
    const Observation& next = k + 1 < events.size() ? events[k + 1].observation : after;
    observe(e.observation);
    act(e.observation.room, e.action, next.room);
  }
  observe(after);
}

void KnowledgeBuilder::add_trajectory(const Trajectory& trajectory) {
  add_events(trajectory.events, trajectory.final_observation);
}

KnowledgeGraph build_graph(const History& history, const WorldIndex& index) {
  KnowledgeBuilder builder(index);
  for (const auto& t : history.trajectories) builder.add_trajectory(t);
  return builder.graph();
}

KnowledgeGraph full_knowledge(const WorldSpec& world) {
  KnowledgeGraph g;
  g.start = world.start_room;
  g.visited_rooms.insert(world.rooms.begin(), world.rooms.end());
  for (const auto& d : world.doors) g.traversed_doors.insert(d.color);
  for (const auto& b : world.balls) g.observed_balls.insert(b.color);
  return g;
}

std::vector<std::vector<std::pair<std::string, RoomId>>> known_adjacency(
    const KnowledgeGraph& graph, const WorldIndex& index) {
  const auto& world = index.world();
  std::vector<std::vector<std::pair<std::string, RoomId>>> adj(
      static_cast<std::size_t>(world.grid_dims.room_count()));
  // traversed_doors is ordered, so every adjacency list comes out sorted by color.
  for (const auto& color : graph.traversed_doors) {
    const Door* d = index.door(color);
    if (d == nullptr) throw InconsistentHistoryError("unknown door " + color);
    adj[static_cast<std::size_t>(world.room_index(d->a))].emplace_back(color, d->b);
    adj[static_cast<std::size_t>(world.room_index(d->b))].emplace_back(color, d->a);
  }
  return adj;
}

namespace {

using Adjacency = std::vector<std::vector<std::pair<std::string, RoomId>>>;

std::vector<int> bfs(const Adjacency& adj, const WorldSpec& world, RoomId from,
                     std::vector<std::pair<int, std::string>>* parent = nullptr) {
  const auto n = adj.size();
  std::vector<int> dist(n, kUnreachable);
  if (parent) parent->assign(n, {-1, {}});
  std::deque<RoomId> queue{from};
  dist[static_cast<std::size_t>(world.room_index(from))] = 0;
  while (!queue.empty()) {
    const RoomId room = queue.front();
    queue.pop_front();
    const auto here = static_cast<std::size_t>(world.room_index(room));
    for (const auto& [color, next] : adj[here]) {
      const auto there = static_cast<std::size_t>(world.room_index(next));
      if (dist[there] != kUnreachable) continue;
      dist[there] = dist[here] + 1;
      if (parent) (*parent)[there] = {static_cast<int>(here), color};
      queue.push_back(next);
    }
  }
  return dist;
}

}  // namespace

std::vector<int> known_distances(const KnowledgeGraph& graph, const WorldIndex& index,
                                 RoomId from) {
  return bfs(known_adjacency(graph, index), index.world(), from);
}

OrienteeringInstance shortest_costs(const KnowledgeGraph& graph, const WorldIndex& index) {
  const auto& world = index.world();
  OrienteeringInstance inst;
  inst.budget = world.door_budget;
  inst.ball_cap = world.max_balls_per_episode;
  inst.labels.push_back(to_string(graph.start));
  inst.prizes.push_back(0);
  inst.node_rooms.push_back(graph.start);
  for (const auto& color : graph.observed_balls) {
    const Ball* b = index.ball(color);
    if (b == nullptr) throw InconsistentHistoryError("unknown ball " + color);
    inst.labels.push_back(color);
    inst.prizes.push_back(b->reward);
    inst.node_rooms.push_back(b->room);
  }

  const auto adj = known_adjacency(graph, index);
  std::map<RoomId, std::vector<int>> dist_from;
  for (RoomId room : inst.node_rooms) {
    if (!dist_from.contains(room)) dist_from.emplace(room, bfs(adj, world, room));
  }
  const auto n = inst.size();
  inst.cost.assign(n, std::vector<int>(n, kUnreachable));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& dist = dist_from.at(inst.node_rooms[i]);
    for (std::size_t j = 0; j < n; ++j) {
      inst.cost[i][j] = dist[static_cast<std::size_t>(world.room_index(inst.node_rooms[j]))];
    }
  }
  return inst;
}

namespace {

struct Search {
  const OrienteeringInstance& inst;
  std::vector<std::size_t> order;  // ball nodes sorted by label
  std::vector<bool> used;
  std::vector<std::size_t> path;
  ExploitSolution best;

  void run(std::size_t node, int cost, int value) {
    for (std::size_t j : order) {
      if (used[j]) continue;
      const int c = inst.cost[node][j];
      if (c >= kUnreachable || cost + c > inst.budget) continue;
      used[j] = true;
      path.push_back(j);
      const int v = value + inst.prizes[j];
      if (v > best.value) {
        best.value = v;
        best.cost_used = cost + c;
        best.path.clear();
        for (std::size_t k : path) best.path.push_back(inst.labels[k]);
      }
      if (static_cast<int>(path.size()) < inst.ball_cap) run(j, cost + c, v);
      path.pop_back();
      used[j] = false;
    }
  }
};

}  // namespace

ExploitSolution solve_orienteering(const OrienteeringInstance& instance) {
  Search search{instance, {}, std::vector<bool>(instance.size(), false), {}, {}};
  for (std::size_t i = 1; i < instance.size(); ++i) search.order.push_back(i);
  std::sort(search.order.begin(), search.order.end(), [&](std::size_t a, std::size_t b) {
    return instance.labels[a] < instance.labels[b];
  });
  // Depth-first preorder over color-sorted nodes enumerates sequences in
  // lexicographic order; keeping only strict improvements keeps the
  // smallest optimal sequence.
  if (instance.size() > 0 && instance.ball_cap > 0) search.run(0, 0, 0);
  return search.best;
}

ExploitSolution solve_knowledge(const KnowledgeGraph& graph, const WorldIndex& index) {
  return solve_orienteering(shortest_costs(graph, index));
}

int compute_r_max(const WorldSpec& world) {
  WorldIndex index(world);
  return solve_knowledge(full_knowledge(world), index).value;
}

std::vector<ObjectRef> plan_route(const KnowledgeGraph& graph, const WorldIndex& index,
                                  const ExploitSolution& solution) {
  const auto& world = index.world();
  const auto adj = known_adjacency(graph, index);
  std::vector<ObjectRef> actions;
  RoomId here = graph.start;
  for (const auto& color : solution.path) {
    const Ball* ball = index.ball(color);
    if (ball == nullptr) throw InconsistentHistoryError("unknown ball " + color);
    std::vector<std::pair<int, std::string>> parent;
    const auto dist = bfs(adj, world, here, &parent);
    auto target = static_cast<std::size_t>(world.room_index(ball->room));
    if (dist[target] == kUnreachable) {
      throw InconsistentHistoryError("ball " + color + " is not reachable over known doors");
    }
    std::vector<ObjectRef> leg;
    for (auto at = target; parent[at].first >= 0; at = static_cast<std::size_t>(parent[at].first)) {
      leg.push_back(ObjectRef{ObjectKind::door, parent[at].second});
    }
    actions.insert(actions.end(), leg.rbegin(), leg.rend());
    actions.push_back(ObjectRef{ObjectKind::ball, color});
    here = ball->room;
  }
  return actions;
}

std::vector<int> exploit_series(const History& history, const WorldIndex& index,
                                Granularity granularity) {
  KnowledgeBuilder builder(index);
  std::vector<int> series;
  for (const auto& t : history.trajectories) {
    if (granularity == Granularity::per_episode) {
      builder.add_trajectory(t);
      series.push_back(solve_knowledge(builder.graph(), index).value);
      continue;
    }
    for (std::size_t k = 0; k < t.events.size(); ++k) {
      const auto& e = t.events[k];
      const Observation& next = k + 1 < t.events.size() ? t.events[k + 1].observation : t.final_observation;
      builder.observe(e.observation);
      builder.act(e.observation.room, e.action, next.room);
      builder.observe(next);
      series.push_back(solve_knowledge(builder.graph(), index).value);
    }
  }
  return series;
}

}  // namespace explorebench
