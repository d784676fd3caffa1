#include <benchmark/benchmark.h>

#include "explorebench/explorebench.hpp"

using namespace explorebench;

namespace {

void run_policy(benchmark::State& state, const std::string& kind) {
  const WorldSpec world = generate_treasure_rooms(3, TreasureRoomsParams{{5, 5}, 0.01, 0.4});
  const EpisodeEngine engine(world);
  std::int64_t steps = 0;
  for (auto _ : state) {
    auto policy = make_scripted_policy(kind, 3);
    History history;
    for (int e = 0; e < 20; ++e) {
      Trajectory t = run_episode(engine, *policy, history);
      steps += static_cast<std::int64_t>(t.events.size());
      history = append_history(std::move(history), std::move(t));
    }
    benchmark::DoNotOptimize(history);
  }
  state.SetItemsProcessed(steps);
}

void BM_RandomWalkRun(benchmark::State& state) { run_policy(state, "random_walk"); }
void BM_SystematicExplorerRun(benchmark::State& state) { run_policy(state, "systematic_explorer"); }
void BM_GreedyExploiterRun(benchmark::State& state) { run_policy(state, "greedy_exploiter"); }
BENCHMARK(BM_RandomWalkRun);
BENCHMARK(BM_SystematicExplorerRun);
BENCHMARK(BM_GreedyExploiterRun);

void BM_RenderPrompt(benchmark::State& state) {
  const WorldSpec world = generate_treasure_rooms(3, TreasureRoomsParams{{5, 5}, 0.01, 0.4});
  const EpisodeEngine engine(world);
  RandomWalkPolicy walk(3);
  History history;
  for (int e = 0; e < 19; ++e) history = append_history(std::move(history), run_episode(engine, walk, history));
  const Trajectory current = run_episode(engine, walk, history);
  const Instruction instruction = InstructionSet().get(InstructionId::task_oriented);
  const auto [start, obs] = engine.reset();
  const auto legal = engine.legal_actions(start);
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_prompt(history, current, instruction, PromptSettings{world.door_budget, 20}, legal));
  }
}
BENCHMARK(BM_RenderPrompt);

}  // namespace
