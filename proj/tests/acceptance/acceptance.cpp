// Acceptance checks. Usage: acceptance [N]. Without an argument every
// criterion runs. Prints one PASS/FAIL line per criterion and exits nonzero
// if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "reference.hpp"

using namespace explorebench;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;  // 0: no limit
  std::function<Outcome()> run;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double round2(double x) { return std::round(x * 100.0) / 100.0; }

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool identity_holds(const GapReport& r) {
  return std::abs(r.raw.total - (r.raw.exploit + r.raw.explore)) <= 1e-12 &&
         std::abs(r.normalized.total - (r.normalized.exploit + r.normalized.explore)) <= 1e-12;
}

RunSummary scripted_summary(const WorldSpec& world, Policy& policy, int episodes, std::uint64_t seed) {
  const History h = testing::run_episodes(world, policy, episodes);
  const WorldIndex index(world);
  const auto per_step = exploit_series(h, index, Granularity::per_interaction);
  return summarize_run(world, h, per_step, 0, RunLabels{policy.kind(), "task_oriented", seed});
}

Outcome decomposition_identity() {
  Rng rng(2024);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const int a = static_cast<int>(rng.below(41));
    const int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(a) + 1));
    const int c = static_cast<int>(rng.below(static_cast<std::uint64_t>(b) + 1));
    const GapReport g = decompose(a, b, c);
    const long residual = std::lround(g.raw.total) - (std::lround(g.raw.exploit) + std::lround(g.raw.explore));
    if (residual != 0 || !identity_holds(g)) ++violations;
  }
  int reports = 0;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const WorldSpec w = generate_treasure_rooms(seed, TreasureRoomsParams{{4, 4}, 0.01, 0.4});
    for (const char* kind : {"random_walk", "systematic_explorer", "greedy_exploiter"}) {
      auto policy = make_scripted_policy(kind, seed);
      const RunSummary s = scripted_summary(w, *policy, 20, seed);
      reports += 2;
      if (!identity_holds(s.last)) ++violations;
      if (!identity_holds(s.mean)) ++violations;
    }
  }
  return {violations == 0, fmt("1000 triples + %d run reports, %d violations", reports, violations)};
}

Outcome table_fixture() {
  const GapReport mistral = decompose(1.00, 0.45, 0.20);
  const GapReport walk = decompose(1.00, 0.68, 0.15);
  const bool ok = round2(mistral.raw.total) == 0.80 && round2(mistral.raw.exploit) == 0.25 &&
                  round2(mistral.raw.explore) == 0.55 && round2(mistral.exploit_fraction) == 0.31 &&
                  round2(mistral.explore_fraction) == 0.69 && round2(walk.raw.total) == 0.85 &&
                  round2(walk.raw.exploit) == 0.53 && round2(walk.raw.explore) == 0.32 &&
                  round2(walk.exploit_fraction) == 0.62 && round2(walk.explore_fraction) == 0.38;
  return {ok, fmt("mistral %.2f = %.2f (%.2f) + %.2f (%.2f); random walk %.2f = %.2f (%.2f) + %.2f (%.2f)",
                  mistral.raw.total, mistral.raw.exploit, mistral.exploit_fraction, mistral.raw.explore,
                  mistral.explore_fraction, walk.raw.total, walk.raw.exploit, walk.exploit_fraction,
                  walk.raw.explore, walk.explore_fraction)};
}

std::string color_label(Rng& rng) {
  static const char* words[] = {"amber", "beige", "coral", "denim", "ebony", "fawn", "gold", "hazel", "ivory", "jade"};
  return words[rng.below(10)] + std::string("_") + std::to_string(rng.below(100));
}

/// Random metric instance: nodes in rooms of a random weighted graph, costs
/// from shortest paths, some rooms cut off.
OrienteeringInstance synthetic_instance(Rng& rng) {
  const int rooms = 2 + static_cast<int>(rng.below(7));
  std::vector<std::vector<int>> d(rooms, std::vector<int>(rooms, kUnreachable));
  for (int i = 0; i < rooms; ++i) d[i][i] = 0;
  for (int i = 0; i < rooms; ++i) {
    for (int j = i + 1; j < rooms; ++j) {
      if (rng.bernoulli(0.45)) d[i][j] = d[j][i] = 1;
    }
  }
  for (int k = 0; k < rooms; ++k)
    for (int i = 0; i < rooms; ++i)
      for (int j = 0; j < rooms; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);

  OrienteeringInstance inst;
  const int balls = static_cast<int>(rng.below(9));
  std::vector<int> room_of{0};
  inst.labels.push_back("r0_0");
  inst.prizes.push_back(0);
  inst.node_rooms.push_back(RoomId{0, 0});
  std::set<std::string> used;
  for (int b = 0; b < balls; ++b) {
    std::string label;
    do label = color_label(rng);
    while (!used.insert(label).second);
    const int room = static_cast<int>(rng.below(static_cast<std::uint64_t>(rooms)));
    room_of.push_back(room);
    inst.labels.push_back(label);
    inst.prizes.push_back(1 + static_cast<int>(rng.below(4)));
    inst.node_rooms.push_back(RoomId{0, room});
  }
  inst.cost.assign(inst.size(), std::vector<int>(inst.size()));
  for (std::size_t i = 0; i < inst.size(); ++i)
    for (std::size_t j = 0; j < inst.size(); ++j) inst.cost[i][j] = d[room_of[i]][room_of[j]];
  inst.budget = static_cast<int>(rng.below(7));
  return inst;
}

Outcome oracle_exactness() {
  Rng rng(31337);
  int value_mismatch = 0;
  int path_mismatch = 0;
  int from_worlds = 0;
  int instances = 0;
  for (std::uint64_t seed = 0; from_worlds < 100; ++seed) {
    const GridDims dims = seed % 2 == 0 ? GridDims{3, 4} : GridDims{4, 4};
    const WorldSpec w = generate_treasure_rooms(seed, TreasureRoomsParams{dims, 0.1, 0.2 + 0.05 * (seed % 6)});
    if (w.balls.size() > 8) continue;
    const WorldIndex index(w);
    RandomWalkPolicy walk(seed);
    const History h = testing::run_episodes(w, walk, 1 + static_cast<int>(seed % 4));
    OrienteeringInstance inst = shortest_costs(build_graph(h, index), index);
    inst.budget = static_cast<int>(rng.below(static_cast<std::uint64_t>(w.door_budget) + 3));
    const ExploitSolution fast = solve_orienteering(inst);
    const ExploitSolution slow = reference::exhaustive_orienteering(inst);
    value_mismatch += fast.value != slow.value;
    path_mismatch += fast.path != slow.path;
    ++from_worlds;
    ++instances;
  }
  for (int i = 0; i < 100; ++i) {
    const OrienteeringInstance inst = synthetic_instance(rng);
    const ExploitSolution fast = solve_orienteering(inst);
    const ExploitSolution slow = reference::exhaustive_orienteering(inst);
    value_mismatch += fast.value != slow.value;
    path_mismatch += fast.path != slow.path;
    ++instances;
  }
  return {value_mismatch == 0 && path_mismatch == 0,
          fmt("%d instances, %d value mismatches, %d path mismatches", instances, value_mismatch, path_mismatch)};
}

Outcome ordering_monotonicity() {
  const GridDims grids[] = {{4, 4}, {5, 5}, {7, 7}};
  int violations = 0;
  int checks = 0;
  for (int run = 0; run < 100; ++run) {
    const auto seed = static_cast<std::uint64_t>(run);
    const WorldSpec w = generate_treasure_rooms(500 + seed, TreasureRoomsParams{grids[run % 3], 0.01, 0.4});
    const WorldIndex index(w);
    RandomWalkPolicy walk(seed + 1);
    const History h = testing::run_episodes(w, walk, 20);
    const auto per_episode = exploit_series(h, index, Granularity::per_episode);
    const auto per_step = exploit_series(h, index, Granularity::per_interaction);
    for (std::size_t i = 0; i < per_episode.size(); ++i) {
      ++checks;
      if (per_episode[i] > w.r_max || per_episode[i] < h.trajectories[i].episode_return()) ++violations;
      if (i > 0 && per_episode[i] < per_episode[i - 1]) ++violations;
    }
    for (std::size_t i = 0; i < per_step.size(); ++i) {
      ++checks;
      if (per_step[i] > w.r_max || (i > 0 && per_step[i] < per_step[i - 1])) ++violations;
    }
  }
  return {violations == 0, fmt("100 runs, %d checks, %d violations", checks, violations)};
}

Outcome full_coverage_closure() {
  int covered = 0;
  int closed = 0;
  int worst_episode = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const WorldSpec w = generate_treasure_rooms(seed, TreasureRoomsParams{{4, 4}, 0.01, 0.4});
    const WorldIndex index(w);
    SystematicExplorerPolicy explorer(seed);
    const History h = testing::run_episodes(w, explorer, 20);
    const auto cov = coverage_series(h, w);
    const auto series = exploit_series(h, index, Granularity::per_episode);
    if (cov.back() == 100.0) {
      ++covered;
      const auto first = std::find(cov.begin(), cov.end(), 100.0) - cov.begin() + 1;
      worst_episode = std::max(worst_episode, static_cast<int>(first));
    }
    if (w.r_max - series.back() == 0) ++closed;
  }
  return {covered == 30 && closed == 30,
          fmt("%d/30 fully covered (latest at episode %d), %d/30 with zero last-episode exploration gap", covered,
              worst_episode, closed)};
}

Outcome random_walk_reproduction() {
  const GridDims grids[] = {{4, 4}, {5, 5}, {7, 7}};
  const double coverage_target[] = {78.79, 72.53, 56.03};
  const double gap_target[] = {0.28, 0.32, 0.34};
  bool pass = true;
  std::string detail;
  double redundancy_sum = 0.0;
  double efficiency_sum = 0.0;
  int runs = 0;
  for (int g = 0; g < 3; ++g) {
    double cov = 0.0;
    double gap = 0.0;
    for (std::uint64_t s = 0; s < 30; ++s) {
      const WorldSpec w = generate_treasure_rooms(1000 + s, TreasureRoomsParams{grids[g], 0.01, 0.4});
      RandomWalkPolicy walk(s + 1);
      const RunSummary summary = scripted_summary(w, walk, 20, s + 1);
      cov += summary.coverage_pct;
      gap += summary.last.normalized.explore;
      redundancy_sum += summary.redundancy;
      efficiency_sum += summary.sample_efficiency;
      ++runs;
    }
    cov /= 30.0;
    gap /= 30.0;
    const bool cov_ok = near(cov, coverage_target[g], 15.0);
    const bool gap_ok = near(gap, gap_target[g], 0.15);
    pass = pass && cov_ok && gap_ok;
    detail += fmt("%s coverage %.2f (target %.2f +-15) %s, explore gap %.3f (target %.2f +-0.15) %s; ",
                  to_string(grids[g]).c_str(), cov, coverage_target[g], cov_ok ? "ok" : "out", gap, gap_target[g],
                  gap_ok ? "ok" : "out");
  }
  const double redundancy = redundancy_sum / runs;
  const double efficiency = efficiency_sum / runs;
  const bool red_ok = near(redundancy, 0.89, 0.05);
  const bool eff_ok = near(efficiency, 51.25, 15.0);
  pass = pass && red_ok && eff_ok;
  detail += fmt("redundancy %.3f (target 0.89 +-0.05) %s; sample efficiency %.2f (target 51.25 +-15) %s", redundancy,
                red_ok ? "ok" : "out", efficiency, eff_ok ? "ok" : "out");
  return {pass, detail};
}

bool has_cycle(const WorldSpec& w) {
  std::map<RoomId, std::vector<std::pair<RoomId, std::size_t>>> adj;
  for (std::size_t i = 0; i < w.doors.size(); ++i) {
    adj[w.doors[i].a].push_back({w.doors[i].b, i});
    adj[w.doors[i].b].push_back({w.doors[i].a, i});
  }
  std::set<RoomId> seen;
  for (const RoomId& root : w.rooms) {
    if (seen.count(root)) continue;
    std::vector<std::pair<RoomId, std::size_t>> stack{{root, w.doors.size()}};
    seen.insert(root);
    while (!stack.empty()) {
      const auto [room, via] = stack.back();
      stack.pop_back();
      for (const auto& [next, door] : adj[room]) {
        if (door == via) continue;
        if (!seen.insert(next).second) return true;
        stack.push_back({next, door});
      }
    }
  }
  return false;
}

Outcome maze_structure() {
  int bad = 0;
  std::string first_problem;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int side = 5 + 2 * static_cast<int>(seed % 3);
    const WorldSpec w = generate_maze(seed, MazeParams{{side, side}, 8});
    std::string problem;
    if (w.doors.size() + 1 != w.rooms.size()) problem = "door count";
    else if (reference::component_count(w) != 1) problem = "disconnected";
    else if (has_cycle(w)) problem = "cycle";
    else if (w.start_room != RoomId{side / 2, side / 2}) problem = "start";
    else if (w.door_budget != 15) problem = "budget";
    if (!problem.empty()) {
      ++bad;
      if (first_problem.empty()) first_problem = fmt(" (seed %d: %s)", static_cast<int>(seed), problem.c_str());
    }
  }
  return {bad == 0, fmt("100 mazes (5x5/7x7/9x9), %d malformed%s", bad, first_problem.c_str())};
}

Outcome transcript_fidelity() {
  const WorldSpec w = testing::transcript_world();
  auto transport = ReplayTransport::load(std::filesystem::path(EXPLOREBENCH_TEST_FIXTURES) / "transcript_replies.jsonl");
  LlmConfig config;
  config.model_name = "mock";
  LlmPolicy policy(transport, config, InstructionSet().get(InstructionId::task_oriented), 1);
  const History h = testing::run_episodes(w, policy, 2);
  const std::string episode1 = render_episode(h.trajectories.at(0));
  const std::string expected1 = slurp(std::filesystem::path(EXPLOREBENCH_TEST_FIXTURES) / "transcript_episode1.txt");

  const auto requests = transport->requests();
  std::string current;
  if (requests.size() > 9) {
    const std::string& prompt = requests[9].messages.back().content;
    const std::string open = "Current episode:\n";
    const auto begin = prompt.find(open);
    const auto end = prompt.find("\nWhich object do you want", begin);
    if (begin != std::string::npos && end != std::string::npos) {
      current = prompt.substr(begin + open.size(), end - begin - open.size());
    }
  }
  const std::string expected2 = slurp(std::filesystem::path(EXPLOREBENCH_TEST_FIXTURES) / "transcript_current.txt");
  const bool history_ok =
      requests.size() > 9 && requests[9].messages.back().content.find("Episode 1:\n" + expected1) != std::string::npos;
  const bool ok = episode1 == expected1 && current == expected2 && history_ok;
  return {ok, fmt("episode 1 block %s, episode 2 block %s, history block %s (%zu requests)",
                  episode1 == expected1 ? "identical" : "differs", current == expected2 ? "identical" : "differs",
                  history_ok ? "identical" : "differs", requests.size())};
}

std::vector<RunConfig> determinism_configs(const std::filesystem::path& out) {
  std::vector<RunConfig> configs;
  const char* kinds[] = {"random_walk", "systematic_explorer", "greedy_exploiter"};
  for (int i = 0; i < 100; ++i) {
    RunConfig c;
    c.name = "det";
    c.world.kind = i % 5 == 4 ? WorldKind::maze : WorldKind::treasure_rooms;
    c.world.dims = c.world.kind == WorldKind::maze ? GridDims{7, 7} : GridDims{4 + i % 2, 4 + i % 2};
    c.world.seed = static_cast<std::uint64_t>(i);
    c.agent.kind = kinds[i % 3];
    c.episodes = 10;
    c.run_seed = static_cast<std::uint64_t>(i) + 1;
    c.output_dir = out;
    c.timestamps = false;
    configs.push_back(c);
  }
  return configs;
}

Outcome determinism_and_replay() {
  const auto a = testing::scratch_dir("acceptance_det_a");
  const auto b = testing::scratch_dir("acceptance_det_b");
  const auto ra = run_batch(determinism_configs(a), 0);
  const auto rb = run_batch(determinism_configs(b), 1);
  int identical = 0;
  int verified = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    if (slurp(ra[i].log_path) == slurp(rb[i].log_path)) ++identical;
    const WorldSpec world = load_world(world_file_path(determinism_configs(a)[i], ra[i].world));
    if (replay(read_run_log(ra[i].log_path), world).ok) ++verified;
  }
  return {identical == 100 && verified == 100,
          fmt("%d/100 logs byte-identical, replay verified %d/100", identical, verified)};
}

Outcome greedy_exploiter_bound() {
  int episodes = 0;
  int mismatches = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const int side = 4 + static_cast<int>(seed % 2);
    const WorldSpec w = seed % 3 == 2 ? generate_maze(seed, MazeParams{})
                                      : generate_treasure_rooms(seed, TreasureRoomsParams{{side, side}, 0.01, 0.4});
    const WorldIndex index(w);
    const EpisodeEngine engine(w);
    RandomWalkPolicy scout(seed + 100);
    History h = testing::run_episodes(w, scout, static_cast<int>(seed % 4));
    GreedyExploiterPolicy greedy(seed);
    for (int e = 0; e < 20; ++e) {
      KnowledgeBuilder builder(index);
      for (const auto& t : h.trajectories) builder.add_trajectory(t);
      builder.observe(engine.reset().second);
      const int expected = solve_knowledge(builder.graph(), index).value;
      Trajectory t = run_episode(engine, greedy, h);
      ++episodes;
      if (t.episode_return() != expected) ++mismatches;
      h = append_history(std::move(h), std::move(t));
    }
  }
  return {mismatches == 0, fmt("30 runs, %d episodes, %d mismatches", episodes, mismatches)};
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "decomposition identity", 1.0, decomposition_identity},
      {2, "table arithmetic fixture", 0.0, table_fixture},
      {3, "oracle exactness", 10.0, oracle_exactness},
      {4, "ordering and monotonicity", 120.0, ordering_monotonicity},
      {5, "full-coverage closure", 30.0, full_coverage_closure},
      {6, "random-walk reproduction", 300.0, random_walk_reproduction},
      {7, "maze structure", 5.0, maze_structure},
      {8, "transcript fidelity", 0.0, transcript_fidelity},
      {9, "determinism and replay", 0.0, determinism_and_replay},
      {10, "greedy-exploiter bound", 0.0, greedy_exploiter_bound},
  };
  return all;
}

bool run_criterion(const Criterion& c) {
  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = c.run();
  } catch (const std::exception& e) {
    outcome = {false, std::string("exception: ") + e.what()};
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = c.time_limit_s <= 0.0 || seconds < c.time_limit_s;
  const bool pass = outcome.pass && in_time;
  std::cout << "criterion " << c.id << " " << (pass ? "PASS" : "FAIL") << " " << c.name << ": " << outcome.detail
            << fmt(" [%.2f s", seconds);
  if (c.time_limit_s > 0.0) std::cout << fmt(", limit %.0f s", c.time_limit_s);
  std::cout << "]\n";
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 2) {
    std::cerr << "usage: acceptance [criterion 1-10]\n";
    return 2;
  }
  bool all_pass = true;
  if (argc == 2) {
    const int id = std::atoi(argv[1]);
    const auto& list = criteria();
    const auto it = std::find_if(list.begin(), list.end(), [&](const Criterion& c) { return c.id == id; });
    if (it == list.end()) {
      std::cerr << "unknown criterion " << argv[1] << "\n";
      return 2;
    }
    all_pass = run_criterion(*it);
  } else {
    for (const auto& c : criteria()) all_pass = run_criterion(c) && all_pass;
  }
  return all_pass ? 0 : 1;
}
