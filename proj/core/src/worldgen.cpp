#include "explorebench/worldgen.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "explorebench/oracle.hpp"
#include "explorebench/rng.hpp"
#include "explorebench/world_index.hpp"

namespace explorebench {

namespace {

// Salts for independent sub-streams of one world seed.
constexpr std::uint64_t kSaltNames = 0x6e616d6573ULL;
constexpr std::uint64_t kSaltLayout = 0x6c61796f7574ULL;

std::vector<RoomId> lattice_rooms(GridDims dims) {
  std::vector<RoomId> rooms;
  for (int r = 0; r < dims.rows; ++r) {
    for (int c = 0; c < dims.cols; ++c) rooms.push_back({r, c});
  }
  return rooms;
}

/// Candidate doors of the full lattice: for each room, east then south.
std::vector<std::pair<RoomId, RoomId>> lattice_edges(GridDims dims) {
  std::vector<std::pair<RoomId, RoomId>> edges;
  for (int r = 0; r < dims.rows; ++r) {
    for (int c = 0; c < dims.cols; ++c) {
      if (c + 1 < dims.cols) edges.push_back({{r, c}, {r, c + 1}});
      if (r + 1 < dims.rows) edges.push_back({{r, c}, {r + 1, c}});
    }
  }
  return edges;
}

/// Fills room_objects with the world's doors and balls under placeholder
/// names, in a per-room random order.
void lay_out_rooms(WorldSpec& world, Rng& rng) {
  world.room_objects.assign(static_cast<std::size_t>(world.grid_dims.room_count()), {});
  for (auto& d : world.doors) {
    world.room_objects[static_cast<std::size_t>(world.room_index(d.a))].push_back(
        {ObjectKind::door, d.color});
    world.room_objects[static_cast<std::size_t>(world.room_index(d.b))].push_back(
        {ObjectKind::door, d.color});
  }
  for (auto& b : world.balls) {
    world.room_objects[static_cast<std::size_t>(world.room_index(b.room))].push_back(
        {ObjectKind::ball, b.color});
  }
  for (auto& objects : world.room_objects) rng.shuffle(std::span<ObjectRef>(objects));
}

void add_doors(WorldSpec& world, const std::vector<std::pair<RoomId, RoomId>>& edges) {
  for (const auto& [a, b] : edges) {
    world.doors.push_back({"door_" + std::to_string(world.doors.size()), a, b});
  }
}

Ball make_ball(RoomId room, std::size_t ordinal, Rng& rng) {
  return Ball{"ball_" + std::to_string(ordinal), room, rng.uniform_int(1, 10)};
}

void finalize(WorldSpec& world, const Palette& palette) {
  Rng layout(mix_seed(world.seed, kSaltLayout));
  lay_out_rooms(world, layout);
  const auto names_seed = mix_seed(world.seed, kSaltNames);
  world = assign_names(std::move(world), palette, names_seed);
  world.door_budget = calibrate_budget(world);
  world.r_max = compute_r_max(world);
  validate_world(world);
}

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      auto& p = parent[static_cast<std::size_t>(x)];
      p = parent[static_cast<std::size_t>(p)];
      x = p;
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(b)] = a;
    return true;
  }
};

}  // namespace

WorldSpec generate_treasure_rooms(std::uint64_t seed, const TreasureRoomsParams& params,
                                  const Palette& palette) {
  if (params.dims.rows < 2 || params.dims.cols < 2) {
    throw std::invalid_argument("treasure rooms need at least 2x2 rooms, got " +
                                to_string(params.dims));
  }
  if (!(params.p_drop >= 0.0 && params.p_drop < 0.5)) {
    throw std::invalid_argument("p_drop must lie in [0, 0.5)");
  }
  if (!(params.p_ball >= 0.0 && params.p_ball <= 1.0)) {
    throw std::invalid_argument("p_ball must lie in [0, 1]");
  }

  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(mix_seed(seed, attempt));
    WorldSpec world;
    world.world_id = "treasure_" + to_string(params.dims) + "_s" + std::to_string(seed);
    world.kind = WorldKind::treasure_rooms;
    world.grid_dims = params.dims;
    world.rooms = lattice_rooms(params.dims);
    world.start_room = {0, 0};
    world.seed = seed;

    std::vector<std::pair<RoomId, RoomId>> kept;
    for (const auto& edge : lattice_edges(params.dims)) {
      if (!rng.bernoulli(params.p_drop)) kept.push_back(edge);
    }
    add_doors(world, kept);
    if (!is_connected(world)) continue;

    for (RoomId room : world.rooms) {
      if (rng.bernoulli(params.p_ball)) world.balls.push_back(make_ball(room, world.balls.size(), rng));
    }
    finalize(world, palette);
    return world;
  }
}

WorldSpec generate_maze(std::uint64_t seed, const MazeParams& params, const Palette& palette) {
  const auto [rows, cols] = params.dims;
  if (rows < 3 || cols < 3 || rows % 2 == 0 || cols % 2 == 0) {
    throw std::invalid_argument("maze dims must be odd and at least 3x3, got " +
                                to_string(params.dims));
  }
  if (params.n_balls < 0 || params.n_balls > rows * cols - 1) {
    throw std::invalid_argument("maze n_balls must lie in [0, rooms - 1]");
  }

  Rng rng(seed);
  WorldSpec world;
  world.world_id = "maze_" + to_string(params.dims) + "_s" + std::to_string(seed);
  world.kind = WorldKind::maze;
  world.grid_dims = params.dims;
  world.rooms = lattice_rooms(params.dims);
  world.start_room = {rows / 2, cols / 2};
  world.seed = seed;

  auto edges = lattice_edges(params.dims);
  rng.shuffle(std::span(edges));
  DisjointSets sets(rows * cols);
  std::vector<std::pair<RoomId, RoomId>> tree;
  for (const auto& [a, b] : edges) {
    if (sets.unite(world.room_index(a), world.room_index(b))) tree.push_back({a, b});
  }
  add_doors(world, tree);

  std::vector<RoomId> candidates;
  for (RoomId room : world.rooms) {
    if (room != world.start_room) candidates.push_back(room);
  }
  rng.shuffle(std::span(candidates));
  candidates.resize(static_cast<std::size_t>(params.n_balls));
  std::sort(candidates.begin(), candidates.end());
  for (RoomId room : candidates) world.balls.push_back(make_ball(room, world.balls.size(), rng));

  finalize(world, palette);
  return world;
}

int calibrate_budget(const WorldSpec& world) {
  const auto dist = door_distances(world, world.start_room);
  if (std::any_of(dist.begin(), dist.end(), [](int d) { return d < 0; })) {
    throw InvariantError("room graph of " + world.world_id + " is disconnected");
  }
  if (world.kind == WorldKind::maze) return kMazeDoorBudget;
  return *std::max_element(dist.begin(), dist.end());
}

WorldSpec assign_names(WorldSpec world, const Palette& palette, std::uint64_t seed) {
  const std::size_t needed = world.doors.size() + world.balls.size();
  if (palette.size() < needed) {
    throw std::invalid_argument("palette of " + std::to_string(palette.size()) +
                                " names cannot label " + std::to_string(needed) + " objects");
  }
  std::vector<std::string> names = palette.names();
  Rng rng(seed);
  rng.shuffle(std::span(names));

  std::map<std::string, std::string> door_names;
  std::map<std::string, std::string> ball_names;
  std::size_t next = 0;
  for (auto& d : world.doors) {
    door_names[d.color] = names[next];
    d.color = names[next++];
  }
  for (auto& b : world.balls) {
    ball_names[b.color] = names[next];
    b.color = names[next++];
  }
  for (auto& objects : world.room_objects) {
    for (auto& ref : objects) {
      auto& table = ref.kind == ObjectKind::door ? door_names : ball_names;
      ref.color = table.at(ref.color);
    }
  }
  for (auto& view : world.entry_views) {
    view.via_door = door_names.at(view.via_door);
    for (auto& ref : view.order) {
      ref.color = (ref.kind == ObjectKind::door ? door_names : ball_names).at(ref.color);
    }
  }
  return world;
}

void validate_world(const WorldSpec& world) {
  const auto fail = [&](const std::string& what) {
    throw InvariantError("world " + world.world_id + ": " + what);
  };
  if (world.grid_dims.rows < 1 || world.grid_dims.cols < 1) fail("empty grid");
  if (world.rooms != lattice_rooms(world.grid_dims)) fail("rooms are not the row-major lattice");
  if (!world.contains(world.start_room)) fail("start room outside the grid");

  std::unordered_set<std::string> names;
  std::set<std::pair<RoomId, RoomId>> pairs;
  for (const auto& d : world.doors) {
    if (!names.insert(d.color).second) fail("duplicate color " + d.color);
    if (!world.contains(d.a) || !world.contains(d.b)) fail("door " + d.color + " leaves the grid");
    const int manhattan = std::abs(d.a.row - d.b.row) + std::abs(d.a.col - d.b.col);
    if (manhattan != 1) fail("door " + d.color + " joins non-adjacent rooms");
    if (!pairs.insert(std::minmax(d.a, d.b)).second) fail("two doors between the same rooms");
  }
  for (const auto& b : world.balls) {
    if (!names.insert(b.color).second) fail("duplicate color " + b.color);
    if (!world.contains(b.room)) fail("ball " + b.color + " outside the grid");
    if (b.reward < 1 || b.reward > 10) fail("ball " + b.color + " reward out of [1, 10]");
  }
  if (world.room_objects.size() != world.rooms.size()) fail("room_objects size mismatch");
  WorldIndex index(world);
  for (RoomId room : world.rooms) {
    const auto& listed = world.objects_in(room);
    std::size_t expected = index.doors_of(room).size();
    for (const auto& b : world.balls) expected += b.room == room ? 1 : 0;
    if (listed.size() != expected) fail("room " + to_string(room) + " lists the wrong objects");
    for (const auto& ref : listed) {
      if (!index.located_in(ref, room)) fail("room " + to_string(room) + " lists " + to_string(ref));
    }
  }
  for (const auto& view : world.entry_views) {
    const Door* via = index.door(view.via_door);
    if (via == nullptr || !via->connects(view.room)) fail("entry view through a foreign door");
    auto expected = world.objects_in(view.room);
    auto listed = view.order;
    std::sort(expected.begin(), expected.end());
    std::sort(listed.begin(), listed.end());
    if (expected != listed) fail("entry view of " + to_string(view.room) + " is not a permutation");
  }
  if (!is_connected(world)) fail("room graph is disconnected");
  if (world.max_balls_per_episode != kMaxBallsPerEpisode) fail("ball cap must be 3");
  if (world.door_budget != calibrate_budget(world)) fail("door budget is not calibrated");
  if (world.r_max != compute_r_max(world)) fail("r_max disagrees with the oracle");
}

}  // namespace explorebench
