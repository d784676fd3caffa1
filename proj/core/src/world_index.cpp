#include "explorebench/world_index.hpp"

#include <algorithm>
#include <deque>

namespace explorebench {

WorldIndex::WorldIndex(const WorldSpec& world)
    : world_(&world), room_doors_(static_cast<std::size_t>(world.grid_dims.room_count())) {
  for (int i = 0; i < static_cast<int>(world.doors.size()); ++i) {
    const auto& d = world.doors[static_cast<std::size_t>(i)];
    doors_by_color_.emplace(d.color, i);
    if (!world.contains(d.a) || !world.contains(d.b)) {
      throw InvariantError("door " + d.color + " references a room outside the grid");
    }
    room_doors_[static_cast<std::size_t>(world.room_index(d.a))].push_back(i);
    room_doors_[static_cast<std::size_t>(world.room_index(d.b))].push_back(i);
  }
  for (int i = 0; i < static_cast<int>(world.balls.size()); ++i) {
    balls_by_color_.emplace(world.balls[static_cast<std::size_t>(i)].color, i);
  }
  for (auto& list : room_doors_) {
    std::sort(list.begin(), list.end(), [&](int x, int y) {
      return world.doors[static_cast<std::size_t>(x)].color <
             world.doors[static_cast<std::size_t>(y)].color;
    });
  }
}

std::optional<int> WorldIndex::door_index(std::string_view color) const {
  auto it = doors_by_color_.find(std::string(color));
  if (it == doors_by_color_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> WorldIndex::ball_index(std::string_view color) const {
  auto it = balls_by_color_.find(std::string(color));
  if (it == balls_by_color_.end()) return std::nullopt;
  return it->second;
}

const Door* WorldIndex::door(std::string_view color) const {
  auto i = door_index(color);
  return i ? &world_->doors[static_cast<std::size_t>(*i)] : nullptr;
}

const Ball* WorldIndex::ball(std::string_view color) const {
  auto i = ball_index(color);
  return i ? &world_->balls[static_cast<std::size_t>(*i)] : nullptr;
}

bool WorldIndex::located_in(const ObjectRef& ref, RoomId room) const {
  if (ref.kind == ObjectKind::door) {
    const Door* d = door(ref.color);
    return d != nullptr && d->connects(room);
  }
  const Ball* b = ball(ref.color);
  return b != nullptr && b->room == room;
}

std::vector<int> door_distances(const WorldSpec& world, RoomId from) {
  const auto n = static_cast<std::size_t>(world.grid_dims.room_count());
  std::vector<std::vector<RoomId>> adj(n);
  for (const auto& d : world.doors) {
    adj[static_cast<std::size_t>(world.room_index(d.a))].push_back(d.b);
    adj[static_cast<std::size_t>(world.room_index(d.b))].push_back(d.a);
  }
  std::vector<int> dist(n, -1);
  std::deque<RoomId> queue{from};
  dist[static_cast<std::size_t>(world.room_index(from))] = 0;
  while (!queue.empty()) {
    const RoomId room = queue.front();
    queue.pop_front();
    const int here = dist[static_cast<std::size_t>(world.room_index(room))];
    for (RoomId next : adj[static_cast<std::size_t>(world.room_index(room))]) {
      auto& slot = dist[static_cast<std::size_t>(world.room_index(next))];
      if (slot < 0) {
        slot = here + 1;
        queue.push_back(next);
      }
    }
  }
  return dist;
}

bool is_connected(const WorldSpec& world) {
  const auto dist = door_distances(world, world.start_room);
  return std::all_of(dist.begin(), dist.end(), [](int d) { return d >= 0; });
}

}  // namespace explorebench
