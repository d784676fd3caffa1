#include "explorebench/world_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace explorebench {

Json to_json(const ObjectRef& ref) { return to_string(ref); }

ObjectRef parse_object_ref(const std::string& text) {
  const auto sep = text.rfind(' ');
  if (sep == std::string::npos) throw std::invalid_argument("malformed object ref: '" + text + "'");
  const auto kind = text.substr(sep + 1);
  ObjectRef ref;
  ref.color = text.substr(0, sep);
  if (kind == "door") {
    ref.kind = ObjectKind::door;
  } else if (kind == "ball") {
    ref.kind = ObjectKind::ball;
  } else {
    throw std::invalid_argument("unknown object kind in '" + text + "'");
  }
  return ref;
}

ObjectRef object_ref_from_json(const Json& j) { return parse_object_ref(j.get<std::string>()); }

Json to_json(const WorldSpec& world) {
  Json j;
  j["world_id"] = world.world_id;
  j["kind"] = std::string(to_string(world.kind));
  j["grid_dims"] = {{"rows", world.grid_dims.rows}, {"cols", world.grid_dims.cols}};
  j["rooms"] = Json::array();
  for (RoomId r : world.rooms) j["rooms"].push_back(to_string(r));
  j["doors"] = Json::array();
  for (const auto& d : world.doors) j["doors"].push_back({d.color, to_string(d.a), to_string(d.b)});
  j["balls"] = Json::array();
  for (const auto& b : world.balls) {
    j["balls"].push_back({{"color", b.color}, {"room", to_string(b.room)}, {"reward", b.reward}});
  }
  j["start_room"] = to_string(world.start_room);
  j["door_budget"] = world.door_budget;
  j["max_balls_per_episode"] = world.max_balls_per_episode;
  j["r_max"] = world.r_max;
  j["discount"] = world.discount;
  j["seed"] = world.seed;
  Json layout = Json::object();
  for (RoomId r : world.rooms) {
    Json objects = Json::array();
    for (const auto& ref : world.objects_in(r)) objects.push_back(to_json(ref));
    layout[to_string(r)] = std::move(objects);
  }
  j["room_objects"] = std::move(layout);
  if (!world.entry_views.empty()) {
    Json views = Json::array();
    for (const auto& v : world.entry_views) {
      Json order = Json::array();
      for (const auto& ref : v.order) order.push_back(to_json(ref));
      views.push_back({{"room", to_string(v.room)}, {"via", v.via_door}, {"order", order}});
    }
    j["entry_views"] = std::move(views);
  }
  return j;
}

WorldSpec world_from_json(const Json& j) {
  WorldSpec w;
  w.world_id = j.at("world_id").get<std::string>();
  w.kind = parse_world_kind(j.at("kind").get<std::string>());
  w.grid_dims = {j.at("grid_dims").at("rows").get<int>(), j.at("grid_dims").at("cols").get<int>()};
  for (const auto& r : j.at("rooms")) w.rooms.push_back(parse_room_id(r.get<std::string>()));
  for (const auto& d : j.at("doors")) {
    if (!d.is_array() || d.size() != 3) throw std::invalid_argument("door must be [color, room_a, room_b]");
    w.doors.push_back({d[0].get<std::string>(), parse_room_id(d[1].get<std::string>()),
                       parse_room_id(d[2].get<std::string>())});
  }
  for (const auto& b : j.at("balls")) {
    w.balls.push_back({b.at("color").get<std::string>(), parse_room_id(b.at("room").get<std::string>()),
                       b.at("reward").get<int>()});
  }
  w.start_room = parse_room_id(j.at("start_room").get<std::string>());
  w.door_budget = j.at("door_budget").get<int>();
  w.max_balls_per_episode = j.at("max_balls_per_episode").get<int>();
  w.r_max = j.at("r_max").get<int>();
  w.discount = j.at("discount").get<double>();
  w.seed = j.at("seed").get<std::uint64_t>();
  w.room_objects.assign(w.rooms.size(), {});
  for (const auto& [room, objects] : j.at("room_objects").items()) {
    const RoomId id = parse_room_id(room);
    if (!w.contains(id)) throw std::invalid_argument("room_objects names unknown room " + room);
    auto& slot = w.room_objects[static_cast<std::size_t>(w.room_index(id))];
    for (const auto& o : objects) slot.push_back(object_ref_from_json(o));
  }
  if (j.contains("entry_views")) {
    for (const auto& v : j.at("entry_views")) {
      EntryView view{parse_room_id(v.at("room").get<std::string>()), v.at("via").get<std::string>(), {}};
      for (const auto& o : v.at("order")) view.order.push_back(object_ref_from_json(o));
      w.entry_views.push_back(std::move(view));
    }
  }
  return w;
}

std::string serialize_world(const WorldSpec& world) { return to_json(world).dump(2) + "\n"; }

void save_world(const WorldSpec& world, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << serialize_world(world);
}

WorldSpec load_world(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open world file " + path.string());
  return world_from_json(Json::parse(in));
}

std::string world_hash(const WorldSpec& world) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_world(world)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace explorebench
