#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "explorebench/explorebench.hpp"

namespace eb = explorebench;

namespace {

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  const std::filesystem::path path(out_path);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << text;
}

int cmd_generate(const std::string& kind, const std::string& dims, std::uint64_t seed, double p_drop,
                 int n_balls, const std::string& palette_path, const std::string& out_path) {
  const eb::Palette palette = palette_path.empty() ? eb::Palette::builtin() : eb::Palette::load(palette_path);
  const eb::WorldKind world_kind = eb::parse_world_kind(kind);
  const eb::GridDims grid =
      eb::parse_dims(dims.empty() ? (world_kind == eb::WorldKind::maze ? "7x7" : "5x5") : dims);
  const eb::WorldSpec world =
      world_kind == eb::WorldKind::maze
          ? eb::generate_maze(seed, eb::MazeParams{grid, n_balls}, palette)
          : eb::generate_treasure_rooms(seed, eb::TreasureRoomsParams{grid, p_drop, 0.4}, palette);
  write_output(eb::serialize_world(world), out_path);
  if (!out_path.empty()) {
    std::cerr << world.world_id << ": budget " << world.door_budget << ", r_max " << world.r_max << ", "
              << world.balls.size() << " balls, " << world.doors.size() << " doors\n";
  }
  return 0;
}

int cmd_run(const std::string& config_path, bool resume, const std::string& summary_path) {
  const eb::RunConfig config = eb::load_run_config(config_path);
  const auto runs = eb::expand_repeats(config);
  eb::RunOptions options;
  options.resume = resume;
  const auto results = eb::run_batch(runs, config.parallel, options);
  std::vector<eb::RunSummary> summaries;
  for (const auto& r : results) {
    summaries.push_back(r.summary);
    std::cout << r.log_path.string() << "\n";
  }
  const std::string target =
      summary_path.empty() ? (config.output_dir / "summary.csv").string() : summary_path;
  write_output(eb::summary_csv(summaries), target);
  std::cerr << results.size() << " run(s) finished; summary written to " << target << "\n";
  return 0;
}

int cmd_solve(const std::string& world_path, const std::string& log_path) {
  const eb::WorldSpec world = eb::load_world(world_path);
  const eb::RunLog log = eb::read_run_log(log_path, true);
  std::cout << eb::solve_report(world, eb::history_from_log(log)).dump(2) << "\n";
  return 0;
}

int cmd_report(const std::string& pattern, const std::string& layout, bool normalize,
               const std::string& out_path) {
  const auto paths = eb::expand_glob(pattern);
  if (paths.empty()) throw std::runtime_error("no run logs match '" + pattern + "'");
  std::vector<eb::ReportRun> runs;
  for (const auto& p : paths) runs.push_back(eb::load_report_run(p));
  write_output(eb::render_report(runs, eb::parse_layout(layout), eb::ReportOptions{normalize}), out_path);
  return 0;
}

int cmd_replay(const std::string& log_path, const std::string& world_path) {
  const eb::WorldSpec world = eb::load_world(world_path);
  const eb::RunLog log = eb::read_run_log(log_path);
  const eb::ReplayVerdict verdict = eb::replay(log, world);
  if (verdict.ok) {
    std::cout << "PASS " << log.events.size() << " events in " << log.episodes.size() << " episodes\n";
    return 0;
  }
  std::cout << "FAIL";
  if (verdict.event_index) std::cout << " at event " << *verdict.event_index;
  std::cout << " (episode " << verdict.episode << ", step " << verdict.step << "): " << verdict.message << "\n";
  return 1;
}

int cmd_exploit_compare(const std::string& config_path, const std::string& log_path, const std::string& out_path) {
  const eb::RunConfig config = eb::load_run_config(config_path);
  if (config.agent.kind != "llm") throw std::invalid_argument("exploit-compare needs an llm agent config");
  const eb::WorldSpec world = eb::resolve_world(config.world);
  const eb::RunLog log = eb::read_run_log(log_path, true);
  if (log.header.world_hash != eb::world_hash(world)) throw eb::WorldMismatchError("log belongs to another world");
  std::shared_ptr<eb::ChatTransport> transport;
  if (config.agent.replay_file) {
    transport = eb::ReplayTransport::load(*config.agent.replay_file);
  } else {
    transport = std::make_shared<eb::HttpTransport>(config.agent.llm);
  }
  const eb::InstructionSet instructions =
      config.instructions_file ? eb::InstructionSet::load(*config.instructions_file) : eb::InstructionSet{};
  const auto points = eb::exploit_comparison(eb::history_from_log(log), world, transport, config.agent.llm,
                                             instructions.get(eb::InstructionId::soft_lower), config.run_seed,
                                             config.episodes);
  std::string csv = "episode,llm_exploit,optimal_exploit\n";
  for (const auto& p : points) {
    csv += std::to_string(p.episode) + "," + std::to_string(p.llm_exploit) + "," +
           std::to_string(p.optimal_exploit) + "\n";
  }
  write_output(csv, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exploration benchmark for text agents in room worlds"};
  app.require_subcommand(1);

  std::string kind = "treasure", dims, palette, out;
  std::uint64_t seed = 0;
  double p_drop = 0.01;
  int n_balls = 8;
  auto* generate = app.add_subcommand("generate", "Generate a world and write world.json");
  generate->add_option("--kind", kind, "treasure or maze")->check(CLI::IsMember({"treasure", "treasure_rooms", "maze"}));
  generate->add_option("--dims", dims, "Grid size as RxC (default: 5x5 treasure rooms, 7x7 maze)");
  generate->add_option("--seed", seed, "Generator seed");
  generate->add_option("--p-drop", p_drop, "Door drop probability in [0, 0.5) (treasure rooms)");
  generate->add_option("--n-balls", n_balls, "Number of balls (maze)")->check(CLI::PositiveNumber);
  generate->add_option("--palette", palette, "Color names file, one snake_case name per line");
  generate->add_option("--out", out, "Output path (default: stdout)");

  std::string config_path, summary_path;
  bool resume = false;
  auto* run = app.add_subcommand("run", "Run the experiments of a config file");
  run->add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  run->add_flag("--resume", resume, "Continue unfinished logs after their last completed episode");
  run->add_option("--summary", summary_path, "summary.csv path (default: <output_dir>/summary.csv)");

  std::string world_path, log_path;
  auto* solve = app.add_subcommand("solve", "Print r_max and the exploitation series of a run log");
  solve->add_option("--world", world_path)->required()->check(CLI::ExistingFile);
  solve->add_option("--log", log_path)->required()->check(CLI::ExistingFile);

  std::string pattern, layout = "gaps_table";
  bool normalize = false;
  auto* report = app.add_subcommand("report", "Aggregate finished run logs into a CSV table");
  report->add_option("--glob", pattern, "Run log glob, e.g. 'runs/*.jsonl'")->required();
  report->add_option("--layout", layout)->check(CLI::IsMember({"gaps_table", "stats_table", "curves"}));
  report->add_flag("--normalize", normalize, "Divide rewards and gaps by each run's r_max");
  report->add_option("--out", out, "Output path (default: stdout)");

  auto* replay = app.add_subcommand("replay", "Re-execute a run log and verify it");
  replay->add_option("--log", log_path)->required()->check(CLI::ExistingFile);
  replay->add_option("--world", world_path)->required()->check(CLI::ExistingFile);

  auto* compare = app.add_subcommand("exploit-compare",
                                     "Pair the model's exploitation of each history prefix with the optimum");
  compare->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
  compare->add_option("--log", log_path)->required()->check(CLI::ExistingFile);
  compare->add_option("--out", out, "Output path (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) return cmd_generate(kind, dims, seed, p_drop, n_balls, palette, out);
    if (*run) return cmd_run(config_path, resume, summary_path);
    if (*solve) return cmd_solve(world_path, log_path);
    if (*report) return cmd_report(pattern, layout, normalize, out);
    if (*replay) return cmd_replay(log_path, world_path);
    if (*compare) return cmd_exploit_compare(config_path, log_path, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
