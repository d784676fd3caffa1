#include "explorebench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "csv.hpp"
#include "explorebench/agents.hpp"
#include "explorebench/oracle.hpp"
#include "explorebench/textio.hpp"
#include "explorebench/worldgen.hpp"

namespace explorebench {

namespace {

void reject_unknown_keys(const Json& j, std::initializer_list<std::string_view> known,
                         std::string_view section) {
  if (!j.is_object()) throw std::invalid_argument(std::string(section) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw std::invalid_argument("unknown key '" + key + "' in " + std::string(section));
    }
  }
}

std::filesystem::path resolve_path(const std::filesystem::path& base, const std::string& text) {
  const std::filesystem::path p(text);
  return p.is_absolute() || base.empty() ? p : base / p;
}

LlmConfig parse_llm(const Json& j) {
  reject_unknown_keys(j,
                      {"endpoint_url", "model", "temperature", "max_retries", "timeout", "rate_limit",
                       "transport_retries", "backoff"},
                      "agent.llm");
  LlmConfig c;
  c.endpoint_url = j.value("endpoint_url", "");
  c.model_name = j.value("model", "");
  c.temperature = j.value("temperature", c.temperature);
  c.max_retries = j.value("max_retries", c.max_retries);
  c.timeout_seconds = j.value("timeout", c.timeout_seconds);
  c.rate_limit_per_minute = j.value("rate_limit", c.rate_limit_per_minute);
  c.transport_retries = j.value("transport_retries", c.transport_retries);
  c.backoff_seconds = j.value("backoff", c.backoff_seconds);
  return c;
}

}  // namespace

void RunConfig::validate() const {
  if (episodes < 1) throw std::invalid_argument("episodes must be at least 1");
  if (repeats < 1) throw std::invalid_argument("repeats must be at least 1");
  if (parallel < 0) throw std::invalid_argument("parallel must be non-negative");
  if (name.empty() || name.find('/') != std::string::npos) throw std::invalid_argument("invalid run name");
  if (agent.kind == "llm") {
    agent.llm.validate();
    if (agent.llm.model_name.empty()) throw std::invalid_argument("llm agent needs a model name");
    if (!agent.replay_file && agent.llm.endpoint_url.empty()) {
      throw std::invalid_argument("llm agent needs an endpoint_url or a replay_file");
    }
  } else if (agent.kind != "random_walk" && agent.kind != "systematic_explorer" &&
             agent.kind != "greedy_exploiter") {
    throw std::invalid_argument("unknown agent kind '" + agent.kind + "'");
  }
  if (!world.path) {
    if (world.dims.rows < 1 || world.dims.cols < 1) throw std::invalid_argument("invalid world dims");
    if (world.p_drop < 0.0 || world.p_drop >= 0.5) throw std::invalid_argument("p_drop must lie in [0, 0.5)");
  }
}

RunConfig parse_run_config(const Json& j, const std::filesystem::path& base_dir) {
  reject_unknown_keys(j,
                      {"name", "world", "agent", "instruction", "instructions_file", "episodes", "run_seed",
                       "output_dir", "repeats", "vary_world_seed", "parallel", "timestamps"},
                      "config");
  RunConfig c;
  c.name = j.value("name", c.name);

  const Json& w = j.at("world");
  reject_unknown_keys(w, {"path", "kind", "dims", "seed", "p_drop", "n_balls"}, "world");
  if (w.contains("path")) {
    c.world.path = resolve_path(base_dir, w.at("path").get<std::string>());
  } else {
    c.world.kind = parse_world_kind(w.at("kind").get<std::string>());
    c.world.dims = parse_dims(w.value("dims", c.world.kind == WorldKind::maze ? "7x7" : "5x5"));
    c.world.seed = w.value("seed", std::uint64_t{0});
    c.world.p_drop = w.value("p_drop", c.world.p_drop);
    c.world.n_balls = w.value("n_balls", c.world.n_balls);
  }

  const Json& a = j.at("agent");
  reject_unknown_keys(a, {"kind", "llm", "replay_file"}, "agent");
  c.agent.kind = a.at("kind").get<std::string>();
  if (a.contains("llm")) c.agent.llm = parse_llm(a.at("llm"));
  if (a.contains("replay_file")) c.agent.replay_file = resolve_path(base_dir, a.at("replay_file").get<std::string>());

  c.instruction = j.value("instruction", c.instruction);
  if (j.contains("instructions_file")) {
    c.instructions_file = resolve_path(base_dir, j.at("instructions_file").get<std::string>());
  }
  c.episodes = j.value("episodes", c.episodes);
  c.run_seed = j.value("run_seed", c.run_seed);
  c.output_dir = j.contains("output_dir") ? resolve_path(base_dir, j.at("output_dir").get<std::string>())
                                          : resolve_path(base_dir, "runs");
  c.repeats = j.value("repeats", c.repeats);
  c.vary_world_seed = j.value("vary_world_seed", c.vary_world_seed);
  c.parallel = j.value("parallel", c.parallel);
  c.timestamps = j.value("timestamps", c.timestamps);
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  const Json j = Json::parse(in);
  return parse_run_config(j, path.parent_path());
}

Json config_echo(const RunConfig& c) {
  Json j;
  j["name"] = c.name;
  Json w;
  if (c.world.path) {
    w["path"] = c.world.path->string();
  } else {
    w["kind"] = to_string(c.world.kind);
    w["dims"] = to_string(c.world.dims);
    w["seed"] = c.world.seed;
    w["p_drop"] = c.world.p_drop;
    w["n_balls"] = c.world.n_balls;
  }
  j["world"] = w;
  Json a;
  a["kind"] = c.agent.kind;
  if (c.agent.kind == "llm") {
    a["llm"] = {{"endpoint_url", c.agent.llm.endpoint_url},
                {"model", c.agent.llm.model_name},
                {"temperature", c.agent.llm.temperature},
                {"max_retries", c.agent.llm.max_retries}};
    if (c.agent.replay_file) a["replay_file"] = c.agent.replay_file->filename().string();
  }
  j["agent"] = a;
  j["instruction"] = c.instruction;
  j["episodes"] = c.episodes;
  j["run_seed"] = c.run_seed;
  return j;
}

std::vector<RunConfig> expand_repeats(const RunConfig& config) {
  std::vector<RunConfig> out;
  for (int k = 0; k < config.repeats; ++k) {
    RunConfig c = config;
    c.repeats = 1;
    c.run_seed = config.run_seed + static_cast<std::uint64_t>(k);
    if (config.vary_world_seed && !config.world.path) c.world.seed = config.world.seed + static_cast<std::uint64_t>(k);
    out.push_back(std::move(c));
  }
  return out;
}

WorldSpec resolve_world(const WorldRef& ref) {
  if (ref.path) {
    WorldSpec world = load_world(*ref.path);
    validate_world(world);
    return world;
  }
  if (ref.kind == WorldKind::maze) return generate_maze(ref.seed, MazeParams{ref.dims, ref.n_balls});
  return generate_treasure_rooms(ref.seed, TreasureRoomsParams{ref.dims, ref.p_drop, 0.4});
}

std::filesystem::path run_log_path(const RunConfig& config, const WorldSpec& world) {
  return config.output_dir /
         (config.name + "_" + world.world_id + "_" + model_label(config.agent) + "_s" +
          std::to_string(config.run_seed) + ".jsonl");
}

std::string model_label(const AgentSpec& agent) {
  return agent.kind == "llm" ? agent.llm.model_name : agent.kind;
}

namespace {

Instruction resolve_instruction(const RunConfig& config) {
  const InstructionSet set =
      config.instructions_file ? InstructionSet::load(*config.instructions_file) : InstructionSet{};
  return set.get(config.instruction);
}

std::unique_ptr<Policy> make_policy(const RunConfig& config, std::shared_ptr<ChatTransport> transport) {
  if (config.agent.kind != "llm") return make_scripted_policy(config.agent.kind, config.run_seed);
  return std::make_unique<LlmPolicy>(std::move(transport), config.agent.llm, resolve_instruction(config),
                                     config.run_seed);
}

std::shared_ptr<ChatTransport> make_transport(const RunConfig& config, const RunOptions& options) {
  if (config.agent.kind != "llm") return nullptr;
  if (options.transport) return options.transport;
  if (config.agent.replay_file) return ReplayTransport::load(*config.agent.replay_file);
  return std::make_shared<HttpTransport>(config.agent.llm);
}

RunResult finished_result(const std::filesystem::path& path, const RunLog& log, WorldSpec world) {
  RunResult result;
  result.log_path = path;
  result.history = history_from_log(log);
  for (const auto& e : log.events) result.exploit_per_interaction.push_back(e.exploit_return_after);
  result.summary = log.footer->summary;
  result.resumed_from = static_cast<int>(log.episodes.size());
  result.world = std::move(world);
  return result;
}

// Concurrent runs on one world write identical bytes; each writes its own
// temporary file and renames it into place.
void save_world_atomically(const WorldSpec& world, const std::filesystem::path& target) {
  std::ostringstream suffix;
  suffix << ".tmp" << std::this_thread::get_id();
  const std::filesystem::path tmp = target.string() + suffix.str();
  save_world(world, tmp);
  std::filesystem::rename(tmp, target);
}

}  // namespace

std::filesystem::path world_file_path(const RunConfig& config, const WorldSpec& world) {
  return config.output_dir / (world.world_id + ".world.json");
}

RunResult run_experiment(const RunConfig& config, const RunOptions& options) {
  config.validate();
  WorldSpec world = resolve_world(config.world);
  const std::string hash = world_hash(world);
  const auto path = run_log_path(config, world);
  save_world_atomically(world, world_file_path(config, world));
  const Json echo = config_echo(config);

  History history;
  std::vector<int> exploit_per_interaction;
  int invalid_actions = 0;
  std::size_t consumed_replies = 0;
  std::optional<std::uintmax_t> keep_bytes;
  int resumed_from = 0;

  if (options.resume && std::filesystem::exists(path)) {
    const RunLog log = read_run_log(path, true);
    if (log.header.world_hash != hash) throw WorldMismatchError("resumed log was written for another world");
    if (log.header.config != echo) throw std::invalid_argument("resumed log was written with another config");
    if (log.footer) return finished_result(path, log, std::move(world));
    history = history_from_log(log);
    for (const auto& e : log.events) {
      exploit_per_interaction.push_back(e.exploit_return_after);
      invalid_actions += e.invalid_count;
      consumed_replies += e.raw_replies.size();
    }
    keep_bytes = log.complete_bytes;
    resumed_from = static_cast<int>(history.size());
  }

  auto transport = make_transport(config, options);
  if (consumed_replies > 0) {
    if (auto replay = std::dynamic_pointer_cast<ReplayTransport>(transport)) replay->skip(consumed_replies);
  }
  auto policy = make_policy(config, transport);

  RunLogWriter writer(path, keep_bytes);
  if (!keep_bytes) {
    RunLogHeader header;
    header.config = echo;
    header.world_id = world.world_id;
    header.world_hash = hash;
    header.r_max = world.r_max;
    header.model = model_label(config.agent);
    header.instruction = config.instruction;
    header.agent_kind = config.agent.kind;
    header.run_seed = config.run_seed;
    header.episodes = config.episodes;
    if (config.timestamps) header.started_at = utc_timestamp();
    writer.write(to_json(header));
  }

  const EpisodeEngine engine(world);
  KnowledgeBuilder knowledge(engine.index());
  for (const auto& t : history.trajectories) knowledge.add_trajectory(t);

  for (int episode = static_cast<int>(history.size()) + 1; episode <= config.episodes; ++episode) {
    std::vector<EventRecord> records;
    const StepObserver observer = [&](const Event& event, const EpisodeState& after, const Observation& next,
                                      const DecisionDiagnostics& diag) {
      knowledge.observe(event.observation);
      knowledge.act(event.observation.room, event.action, next.room);
      knowledge.observe(next);
      const int exploit = solve_knowledge(knowledge.graph(), engine.index()).value;
      exploit_per_interaction.push_back(exploit);
      invalid_actions += diag.invalid_count;
      EventRecord r;
      r.episode = episode;
      r.step = static_cast<int>(records.size()) + 1;
      r.room = event.observation.room;
      r.observation = event.observation.visible;
      r.raw_replies = diag.raw_replies;
      r.invalid_count = diag.invalid_count;
      r.fallback = diag.fallback;
      r.action = event.action;
      r.reward = event.reward;
      r.doors_used = after.doors_used;
      r.balls_collected = after.balls_collected;
      r.exploit_return_after = exploit;
      writer.write(to_json(r));
      records.push_back(std::move(r));
    };
    Trajectory t = run_episode(engine, *policy, history, config.episodes, observer);
    history = append_history(std::move(history), std::move(t));
    EpisodeEndRecord end;
    end.episode = episode;
    end.episode_return = history.trajectories.back().episode_return();
    end.exploit_return = solve_knowledge(knowledge.graph(), engine.index()).value;
    end.coverage_pct = 100.0 * static_cast<double>(knowledge.graph().visited_rooms.size()) /
                       static_cast<double>(world.rooms.size());
    end.final_observation = history.trajectories.back().final_observation;
    writer.write(to_json(end));
    if (options.after_episode) options.after_episode(episode);
  }

  RunResult result;
  result.summary = summarize_run(world, history, exploit_per_interaction, invalid_actions,
                                 RunLabels{model_label(config.agent), config.instruction, config.run_seed});
  writer.write(to_json(RunLogFooter{result.summary, config.timestamps ? utc_timestamp() : ""}));
  result.log_path = path;
  result.history = std::move(history);
  result.exploit_per_interaction = std::move(exploit_per_interaction);
  result.resumed_from = resumed_from;
  result.world = std::move(world);
  return result;
}

std::vector<RunResult> run_batch(const std::vector<RunConfig>& configs, int parallel,
                                 const RunOptions& options) {
  // LLM runs against the same endpoint share one rate-limited client.
  std::map<std::pair<std::string, std::string>, std::shared_ptr<ChatTransport>> shared;
  std::vector<RunOptions> per_run(configs.size(), options);
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& c = configs[i];
    if (c.agent.kind != "llm" || options.transport || c.agent.replay_file) continue;
    auto& transport = shared[{c.agent.llm.endpoint_url, c.agent.llm.model_name}];
    if (!transport) transport = std::make_shared<HttpTransport>(c.agent.llm);
    per_run[i].transport = transport;
  }

  std::size_t workers = parallel > 0 ? static_cast<std::size_t>(parallel)
                                     : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(configs.size(), 1));
  std::vector<std::optional<RunResult>> results(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        results[i] = run_experiment(configs[i], per_run[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<RunResult> out;
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

namespace {

std::string describe(const std::vector<ObjectRef>& refs) {
  std::string out = "[";
  for (std::size_t i = 0; i < refs.size(); ++i) out += (i ? ", " : "") + to_string(refs[i]);
  return out + "]";
}

}  // namespace

ReplayVerdict replay(const RunLog& log, const WorldSpec& world) {
  if (log.header.world_hash != world_hash(world)) {
    throw WorldMismatchError("world hash " + world_hash(world) + " does not match the log's " +
                             log.header.world_hash);
  }
  const EpisodeEngine engine(world);
  KnowledgeBuilder knowledge(engine.index());
  std::size_t index = 0;
  int previous_exploit = 0;
  ReplayVerdict verdict;
  const auto fail = [&](int episode, int step, std::optional<std::size_t> at, std::string message) {
    verdict.ok = false;
    verdict.event_index = at;
    verdict.episode = episode;
    verdict.step = step;
    verdict.message = std::move(message);
    return verdict;
  };

  for (const auto& end : log.episodes) {
    auto [state, obs] = engine.reset();
    int step = 0;
    int episode_return = 0;
    while (index < log.events.size() && log.events[index].episode == end.episode) {
      const EventRecord& e = log.events[index];
      ++step;
      if (state.done) return fail(end.episode, step, index, "event after the episode ended");
      if (e.step != step) return fail(end.episode, step, index, "step counter out of sequence");
      if (e.room != obs.room || e.observation != obs.visible) {
        return fail(end.episode, step, index,
                    "observation differs: expected " + to_string(obs.room) + " " + describe(obs.visible));
      }
      StepResult r;
      try {
        r = engine.step(state, e.action);
      } catch (const IllegalActionError& err) {
        return fail(end.episode, step, index, err.what());
      }
      if (r.reward != e.reward) {
        return fail(end.episode, step, index,
                    "reward differs: expected " + std::to_string(r.reward) + ", logged " + std::to_string(e.reward));
      }
      if (r.state.doors_used != e.doors_used || r.state.balls_collected != e.balls_collected) {
        return fail(end.episode, step, index, "episode counters differ");
      }
      knowledge.observe(obs);
      knowledge.act(obs.room, e.action, r.observation.room);
      knowledge.observe(r.observation);
      const int exploit = solve_knowledge(knowledge.graph(), engine.index()).value;
      if (exploit != e.exploit_return_after) {
        return fail(end.episode, step, index,
                    "exploitation value differs: expected " + std::to_string(exploit) + ", logged " +
                        std::to_string(e.exploit_return_after));
      }
      if (exploit < previous_exploit) return fail(end.episode, step, index, "exploitation value decreased");
      previous_exploit = exploit;
      episode_return += r.reward;
      state = std::move(r.state);
      obs = std::move(r.observation);
      ++index;
    }
    if (!state.done) return fail(end.episode, step, std::nullopt, "episode ended before termination");
    if (end.final_observation != obs) return fail(end.episode, step, std::nullopt, "final observation differs");
    if (end.episode_return != episode_return) return fail(end.episode, step, std::nullopt, "episode return differs");
    if (end.exploit_return != previous_exploit) {
      return fail(end.episode, step, std::nullopt, "episode exploitation value differs");
    }
  }
  if (index != log.events.size()) return fail(0, 0, index, "events outside any episode");
  if (log.header.r_max != world.r_max) return fail(0, 0, std::nullopt, "r_max differs");
  if (log.footer) {
    const auto& s = log.footer->summary;
    if (s.r_max != world.r_max || s.episodes != static_cast<int>(log.episodes.size()) ||
        s.interactions != static_cast<int>(log.events.size())) {
      return fail(0, 0, std::nullopt, "footer summary does not match the events");
    }
  }
  return verdict;
}

Json solve_report(const WorldSpec& world, const History& history) {
  const WorldIndex index(world);
  Json j;
  j["world_id"] = world.world_id;
  j["r_max"] = compute_r_max(world);
  j["exploit_per_episode"] = exploit_series(history, index, Granularity::per_episode);
  j["exploit_per_interaction"] = exploit_series(history, index, Granularity::per_interaction);
  const ExploitSolution final_solution = solve_knowledge(build_graph(history, index), index);
  j["final_path"] = final_solution.path;
  j["final_cost"] = final_solution.cost_used;
  return j;
}

std::string summary_csv(std::span<const RunSummary> summaries) {
  using detail::csv_row;
  using detail::format_number;
  std::string out = csv_row(summary_columns());
  for (const auto& s : summaries) {
    out += csv_row({s.model,
                    s.instruction,
                    s.env_kind,
                    s.dims,
                    std::to_string(s.seed),
                    std::to_string(s.r_max),
                    std::to_string(s.exploit_return_final),
                    format_number(s.agent_return_mean),
                    std::to_string(s.agent_return_final),
                    format_number(s.last.raw.total),
                    format_number(s.last.raw.exploit),
                    format_number(s.last.raw.explore),
                    format_number(s.mean.raw.total),
                    format_number(s.mean.raw.exploit),
                    format_number(s.mean.raw.explore),
                    format_number(s.coverage_pct),
                    format_number(s.redundancy),
                    std::to_string(s.sample_efficiency),
                    std::to_string(s.invalid_actions),
                    std::to_string(s.episodes),
                    std::to_string(s.interactions)});
  }
  return out;
}

}  // namespace explorebench
