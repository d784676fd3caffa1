#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace explorebench {

/// Grid coordinate of a room. Rooms are addressed row-major and rendered as
/// "r<row>_<col>" in serialized files.
struct RoomId {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const RoomId&, const RoomId&) = default;
};

std::string to_string(RoomId room);
RoomId parse_room_id(std::string_view text);

enum class ObjectKind { door, ball };

std::string_view to_string(ObjectKind kind);

/// Reference to a world object by its (globally unique) color name.
struct ObjectRef {
  ObjectKind kind = ObjectKind::door;
  std::string color;

  friend auto operator<=>(const ObjectRef&, const ObjectRef&) = default;
};

/// "color kind", e.g. "dodger_blue door".
std::string to_string(const ObjectRef& ref);

struct Door {
  std::string color;
  RoomId a;
  RoomId b;

  bool connects(RoomId room) const { return a == room || b == room; }
  RoomId other_side(RoomId from) const { return from == a ? b : a; }

  friend bool operator==(const Door&, const Door&) = default;
};

struct Ball {
  std::string color;
  RoomId room;
  int reward = 0;

  friend bool operator==(const Ball&, const Ball&) = default;
};

enum class WorldKind { treasure_rooms, maze };

std::string_view to_string(WorldKind kind);
WorldKind parse_world_kind(std::string_view text);

struct GridDims {
  int rows = 0;
  int cols = 0;

  int room_count() const { return rows * cols; }
  friend bool operator==(const GridDims&, const GridDims&) = default;
};

/// Parses "RxC" (e.g. "5x5").
GridDims parse_dims(std::string_view text);
std::string to_string(GridDims dims);

/// Alternative listing order of a room's objects when it is entered through
/// a particular door (the perspective-dependent ordering seen in recorded
/// transcripts). Generated worlds carry none.
struct EntryView {
  RoomId room;
  std::string via_door;
  std::vector<ObjectRef> order;

  friend bool operator==(const EntryView&, const EntryView&) = default;
};

inline constexpr int kMaxBallsPerEpisode = 3;
inline constexpr int kMazeDoorBudget = 15;

/// Immutable ground truth of one environment instance.
///
/// `room_objects` fixes the order in which a room lists its contents. The
/// order is chosen once at generation and reused by every observation, so
/// transcripts are reproducible.
struct WorldSpec {
  std::string world_id;
  WorldKind kind = WorldKind::treasure_rooms;
  GridDims grid_dims;
  std::vector<RoomId> rooms;
  std::vector<Door> doors;
  std::vector<Ball> balls;
  RoomId start_room;
  int door_budget = 0;
  int max_balls_per_episode = kMaxBallsPerEpisode;
  int r_max = 0;
  double discount = 1.0;
  std::uint64_t seed = 0;
  std::vector<std::vector<ObjectRef>> room_objects;  // indexed by room_index
  std::vector<EntryView> entry_views;

  int room_index(RoomId room) const { return room.row * grid_dims.cols + room.col; }
  bool contains(RoomId room) const {
    return room.row >= 0 && room.col >= 0 && room.row < grid_dims.rows &&
           room.col < grid_dims.cols;
  }
  const Door* find_door(std::string_view color) const;
  const Ball* find_ball(std::string_view color) const;
  const std::vector<ObjectRef>& objects_in(RoomId room) const {
    return room_objects.at(static_cast<std::size_t>(room_index(room)));
  }
  /// Listing order for a room entered through `via_door`; the base order
  /// when no entry view matches or `via_door` is empty.
  const std::vector<ObjectRef>& view_of(RoomId room, std::string_view via_door) const;

  friend bool operator==(const WorldSpec&, const WorldSpec&) = default;
};

/// Thrown when a world, history or log does not satisfy its structural
/// invariants.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace explorebench

template <>
struct std::hash<explorebench::RoomId> {
  std::size_t operator()(const explorebench::RoomId& r) const noexcept {
    return std::hash<long long>{}((static_cast<long long>(r.row) << 32) ^
                                  static_cast<unsigned>(r.col));
  }
};
