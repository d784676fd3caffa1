#include <benchmark/benchmark.h>

#include "explorebench/explorebench.hpp"

using namespace explorebench;

namespace {

void BM_ComputeRMax(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const WorldSpec world = generate_treasure_rooms(11, TreasureRoomsParams{{side, side}, 0.01, 0.4});
  for (auto _ : state) benchmark::DoNotOptimize(compute_r_max(world));
}
BENCHMARK(BM_ComputeRMax)->Arg(4)->Arg(5)->Arg(7)->Arg(9);

void BM_ExploitSeriesPerInteraction(benchmark::State& state) {
  const WorldSpec world = generate_treasure_rooms(5, TreasureRoomsParams{{7, 7}, 0.01, 0.4});
  const WorldIndex index(world);
  RandomWalkPolicy walk(5);
  const EpisodeEngine engine(world);
  History history;
  for (int e = 0; e < 20; ++e) history = append_history(std::move(history), run_episode(engine, walk, history));
  for (auto _ : state) benchmark::DoNotOptimize(exploit_series(history, index, Granularity::per_interaction));
}
BENCHMARK(BM_ExploitSeriesPerInteraction);

}  // namespace
