#include "explorebench/types.hpp"

#include <charconv>

namespace explorebench {

namespace {

int parse_int(std::string_view text, std::string_view what) {
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw std::invalid_argument("malformed " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string to_string(RoomId room) {
  return "r" + std::to_string(room.row) + "_" + std::to_string(room.col);
}

RoomId parse_room_id(std::string_view text) {
  const auto sep = text.find('_');
  if (text.size() < 4 || text.front() != 'r' || sep == std::string_view::npos) {
    throw std::invalid_argument("malformed room id: '" + std::string(text) + "'");
  }
  return RoomId{parse_int(text.substr(1, sep - 1), "room id"),
                parse_int(text.substr(sep + 1), "room id")};
}

std::string_view to_string(ObjectKind kind) {
  return kind == ObjectKind::door ? "door" : "ball";
}

std::string to_string(const ObjectRef& ref) {
  return ref.color + " " + std::string(to_string(ref.kind));
}

std::string_view to_string(WorldKind kind) {
  return kind == WorldKind::treasure_rooms ? "treasure_rooms" : "maze";
}

WorldKind parse_world_kind(std::string_view text) {
  if (text == "treasure_rooms" || text == "treasure") return WorldKind::treasure_rooms;
  if (text == "maze") return WorldKind::maze;
  throw std::invalid_argument("unknown world kind: '" + std::string(text) + "'");
}

GridDims parse_dims(std::string_view text) {
  const auto sep = text.find_first_of("xX");
  if (sep == std::string_view::npos) {
    throw std::invalid_argument("dims must look like RxC, got '" + std::string(text) + "'");
  }
  return GridDims{parse_int(text.substr(0, sep), "dims"), parse_int(text.substr(sep + 1), "dims")};
}

std::string to_string(GridDims dims) {
  return std::to_string(dims.rows) + "x" + std::to_string(dims.cols);
}

const Door* WorldSpec::find_door(std::string_view color) const {
  for (const auto& d : doors) {
    if (d.color == color) return &d;
  }
  return nullptr;
}

const std::vector<ObjectRef>& WorldSpec::view_of(RoomId room, std::string_view via_door) const {
  if (!via_door.empty()) {
    for (const auto& v : entry_views) {
      if (v.room == room && v.via_door == via_door) return v.order;
    }
  }
  return objects_in(room);
}

const Ball* WorldSpec::find_ball(std::string_view color) const {
  for (const auto& b : balls) {
    if (b.color == color) return &b;
  }
  return nullptr;
}

}  // namespace explorebench
