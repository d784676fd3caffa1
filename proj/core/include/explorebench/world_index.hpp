#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "explorebench/types.hpp"

namespace explorebench {

/// Lookup tables over a WorldSpec: color -> object, room -> incident doors.
/// Holds a reference; the world must outlive the index.
class WorldIndex {
 public:
  explicit WorldIndex(const WorldSpec& world);

  const WorldSpec& world() const { return *world_; }

  const Door* door(std::string_view color) const;
  const Ball* ball(std::string_view color) const;
  std::optional<int> door_index(std::string_view color) const;
  std::optional<int> ball_index(std::string_view color) const;

  /// Indices into world().doors, sorted by door color.
  const std::vector<int>& doors_of(RoomId room) const {
    return room_doors_[static_cast<std::size_t>(world_->room_index(room))];
  }

  /// True when `ref` names an object located in `room`.
  bool located_in(const ObjectRef& ref, RoomId room) const;

 private:
  const WorldSpec* world_;
  std::unordered_map<std::string, int> doors_by_color_;
  std::unordered_map<std::string, int> balls_by_color_;
  std::vector<std::vector<int>> room_doors_;
};

/// BFS door-distance from `from` to every room over all doors of the world;
/// -1 for unreachable rooms. Indexed by room_index.
std::vector<int> door_distances(const WorldSpec& world, RoomId from);

/// True when every room is reachable from the start room.
bool is_connected(const WorldSpec& world);

}  // namespace explorebench
