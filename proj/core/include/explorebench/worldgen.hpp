#pragma once

#include <cstdint>

#include "explorebench/palette.hpp"
#include "explorebench/types.hpp"

namespace explorebench {

struct TreasureRoomsParams {
  GridDims dims{5, 5};
  double p_drop = 0.01;  // each candidate door removed independently
  double p_ball = 0.4;   // each room holds one ball with this probability
};

struct MazeParams {
  GridDims dims{7, 7};
  int n_balls = 8;  // placed in distinct rooms other than the start
};

/// Dark Treasure Rooms: a full door lattice with random door drops (worlds
/// that end up disconnected are regenerated under the next sub-seed), balls
/// placed per room, start in the corner and a budget equal to the start's
/// eccentricity.
WorldSpec generate_treasure_rooms(std::uint64_t seed, const TreasureRoomsParams& params,
                                  const Palette& palette = Palette::builtin());

/// Randomized Kruskal spanning tree over the lattice with the start in the
/// center room and a fixed budget of 15 door traversals.
WorldSpec generate_maze(std::uint64_t seed, const MazeParams& params,
                        const Palette& palette = Palette::builtin());

/// Eccentricity of the start room (treasure rooms) or 15 (mazes). Throws
/// InvariantError when the room graph is disconnected.
int calibrate_budget(const WorldSpec& world);

/// Relabels doors, then balls, with distinct names drawn from a
/// seed-shuffled copy of the palette. Per-room object lists are renamed in
/// place so their order is preserved.
WorldSpec assign_names(WorldSpec world, const Palette& palette, std::uint64_t seed);

/// Checks every structural invariant of a world; throws InvariantError.
void validate_world(const WorldSpec& world);

}  // namespace explorebench
