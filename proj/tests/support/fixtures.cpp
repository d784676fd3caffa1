#include "fixtures.hpp"

#include <map>
#include <set>

namespace explorebench::testing {

namespace {

RoomId r(int row, int col) { return RoomId{row, col}; }

}  // namespace

ObjectRef door(const std::string& color) { return ObjectRef{ObjectKind::door, color}; }
ObjectRef ball(const std::string& color) { return ObjectRef{ObjectKind::ball, color}; }

WorldSpec transcript_world() {
  WorldSpec w;
  w.world_id = "transcript_5x5";
  w.kind = WorldKind::treasure_rooms;
  w.grid_dims = GridDims{5, 5};
  for (int row = 0; row < 5; ++row) {
    for (int col = 0; col < 5; ++col) w.rooms.push_back(r(row, col));
  }
  w.start_room = r(0, 1);

  const std::map<std::pair<RoomId, RoomId>, std::string> named{
      {{r(0, 1), r(1, 1)}, "dodger_blue"}, {{r(0, 1), r(0, 2)}, "tangerine"},
      {{r(1, 0), r(1, 1)}, "apricot"},     {{r(1, 1), r(2, 1)}, "cerulean"},
      {{r(1, 1), r(1, 2)}, "honeydew"},    {{r(2, 1), r(3, 1)}, "teal"},
      {{r(3, 1), r(4, 1)}, "magenta"}};
  const std::set<std::pair<RoomId, RoomId>> dropped{
      {r(0, 0), r(0, 1)}, {r(0, 2), r(0, 3)}, {r(0, 2), r(1, 2)}, {r(2, 0), r(2, 1)}, {r(2, 1), r(2, 2)},
      {r(3, 0), r(3, 1)}, {r(3, 1), r(3, 2)}, {r(3, 3), r(4, 3)}, {r(4, 2), r(4, 3)}};
  w.balls = {Ball{"rosewood", r(2, 1), 3}, Ball{"turquoise", r(3, 1), 2}, Ball{"khaki", r(3, 1), 3},
             Ball{"midnight_blue", r(0, 2), 5}};

  std::set<std::string> reserved{"midnight_blue", "rosewood", "turquoise", "khaki"};
  for (const auto& [pair, color] : named) reserved.insert(color);
  const auto& palette = Palette::builtin().names();
  std::size_t next_name = 0;
  const auto fresh_name = [&] {
    while (reserved.contains(palette[next_name])) ++next_name;
    return palette[next_name++];
  };

  for (int row = 0; row < 5; ++row) {
    for (int col = 0; col < 5; ++col) {
      for (const RoomId other : {r(row, col + 1), r(row + 1, col)}) {
        if (other.row > 4 || other.col > 4) continue;
        const std::pair<RoomId, RoomId> pair{r(row, col), other};
        if (dropped.contains(pair)) continue;
        const auto it = named.find(pair);
        w.doors.push_back(Door{it != named.end() ? it->second : fresh_name(), pair.first, pair.second});
      }
    }
  }

  w.room_objects.resize(w.rooms.size());
  const std::map<RoomId, std::vector<ObjectRef>> listed{
      {r(0, 1), {door("dodger_blue"), door("tangerine")}},
      {r(0, 2), {ball("midnight_blue"), door("tangerine")}},
      {r(1, 1), {door("apricot"), door("dodger_blue"), door("cerulean"), door("honeydew")}},
      {r(2, 1), {ball("rosewood"), door("teal"), door("cerulean")}},
      {r(3, 1), {ball("turquoise"), door("magenta"), door("teal"), ball("khaki")}}};
  for (const RoomId room : w.rooms) {
    auto& objects = w.room_objects[static_cast<std::size_t>(w.room_index(room))];
    if (const auto it = listed.find(room); it != listed.end()) {
      objects = it->second;
      continue;
    }
    for (const auto& d : w.doors) {
      if (d.connects(room)) objects.push_back(door(d.color));
    }
  }
  w.entry_views = {EntryView{r(0, 1), "tangerine", {door("tangerine"), door("dodger_blue")}}};
  w.door_budget = calibrate_budget(w);
  w.r_max = compute_r_max(w);
  validate_world(w);
  return w;
}

std::vector<std::string> transcript_episode1_replies() {
  return {"<dodger_blue door>", "<cerulean door>",  "<rosewood ball>",
          "<teal door>",        "<turquoise ball>", "<khaki ball>"};
}

std::vector<std::string> transcript_episode2_replies() {
  return {"<tangerine door>", "<midnight_blue ball>", "<tangerine door>"};
}

History run_episodes(const WorldSpec& world, Policy& policy, int episodes) {
  const EpisodeEngine engine(world);
  History history;
  for (int i = 0; i < episodes; ++i) {
    history = append_history(std::move(history), run_episode(engine, policy, history, episodes));
  }
  return history;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("explorebench_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace explorebench::testing
