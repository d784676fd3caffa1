#include <benchmark/benchmark.h>

#include "explorebench/explorebench.hpp"

using namespace explorebench;

namespace {

void BM_GenerateTreasureRooms(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_treasure_rooms(seed++, TreasureRoomsParams{{side, side}, 0.01, 0.4}));
  }
}
BENCHMARK(BM_GenerateTreasureRooms)->Arg(4)->Arg(5)->Arg(7);

void BM_GenerateMaze(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generate_maze(seed++, MazeParams{{side, side}, 8}));
}
BENCHMARK(BM_GenerateMaze)->Arg(7)->Arg(11);

void BM_SerializeWorld(benchmark::State& state) {
  const WorldSpec world = generate_maze(1, MazeParams{});
  for (auto _ : state) benchmark::DoNotOptimize(world_from_json(Json::parse(serialize_world(world))));
}
BENCHMARK(BM_SerializeWorld);

}  // namespace
