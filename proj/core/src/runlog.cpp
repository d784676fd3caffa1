#include "explorebench/runlog.hpp"

#include <chrono>
#include <ctime>
#include <stdexcept>

namespace explorebench {

namespace {

Json refs_to_json(const std::vector<ObjectRef>& refs) {
  Json out = Json::array();
  for (const auto& r : refs) out.push_back(to_string(r));
  return out;
}

std::vector<ObjectRef> refs_from_json(const Json& j) {
  std::vector<ObjectRef> out;
  for (const auto& item : j) out.push_back(parse_object_ref(item.get<std::string>()));
  return out;
}

Json observation_to_json(const Observation& obs) {
  return Json{{"room", to_string(obs.room)}, {"visible", refs_to_json(obs.visible)}};
}

Observation observation_from_json(const Json& j) {
  return Observation{parse_room_id(j.at("room").get<std::string>()), refs_from_json(j.at("visible"))};
}

GapReport gaps_from_json(const Json& j, const std::string& prefix, GapScope scope) {
  GapReport r;
  r.scope = scope;
  r.raw = Gaps{j.at(prefix + "_total_gap").get<double>(), j.at(prefix + "_exploit_gap").get<double>(),
               j.at(prefix + "_explore_gap").get<double>()};
  r.normalized = Gaps{j.at(prefix + "_total_gap_norm").get<double>(),
                      j.at(prefix + "_exploit_gap_norm").get<double>(),
                      j.at(prefix + "_explore_gap_norm").get<double>()};
  std::tie(r.exploit_fraction, r.explore_fraction) = gap_fractions(r.raw);
  return r;
}

EventRecord event_from_json(const Json& j) {
  EventRecord e;
  e.episode = j.at("episode").get<int>();
  e.step = j.at("step").get<int>();
  e.room = parse_room_id(j.at("room").get<std::string>());
  e.observation = refs_from_json(j.at("observation"));
  if (j.contains("raw_reply")) e.raw_replies = j.at("raw_reply").get<std::vector<std::string>>();
  e.invalid_count = j.value("invalid_count", 0);
  e.fallback = j.value("fallback", false);
  e.action = parse_object_ref(j.at("action").get<std::string>());
  e.reward = j.at("reward").get<int>();
  e.doors_used = j.at("doors_used").get<int>();
  e.balls_collected = j.at("balls_collected").get<int>();
  e.exploit_return_after = j.at("exploit_return_after").get<int>();
  return e;
}

RunLogHeader header_from_json(const Json& j) {
  if (j.value("format", "") != kRunLogFormat) throw std::runtime_error("not a run log (format mismatch)");
  RunLogHeader h;
  h.config = j.at("config");
  h.world_id = j.at("world_id").get<std::string>();
  h.world_hash = j.at("world_hash").get<std::string>();
  h.r_max = j.at("r_max").get<int>();
  h.model = j.at("model").get<std::string>();
  h.instruction = j.at("instruction").get<std::string>();
  h.agent_kind = j.at("agent_kind").get<std::string>();
  h.run_seed = j.at("run_seed").get<std::uint64_t>();
  h.episodes = j.at("episodes").get<int>();
  h.started_at = j.value("started_at", "");
  return h;
}

}  // namespace

Json to_json(const RunLogHeader& h) {
  Json j;
  j["type"] = "header";
  j["format"] = kRunLogFormat;
  j["config"] = h.config;
  j["world_id"] = h.world_id;
  j["world_hash"] = h.world_hash;
  j["r_max"] = h.r_max;
  j["model"] = h.model;
  j["instruction"] = h.instruction;
  j["agent_kind"] = h.agent_kind;
  j["run_seed"] = h.run_seed;
  j["episodes"] = h.episodes;
  if (!h.started_at.empty()) j["started_at"] = h.started_at;
  return j;
}

Json to_json(const EventRecord& e) {
  Json j;
  j["type"] = "event";
  j["episode"] = e.episode;
  j["step"] = e.step;
  j["room"] = to_string(e.room);
  j["observation"] = refs_to_json(e.observation);
  if (!e.raw_replies.empty()) {
    j["raw_reply"] = e.raw_replies;
    j["invalid_count"] = e.invalid_count;
    j["fallback"] = e.fallback;
  }
  j["action"] = to_string(e.action);
  j["reward"] = e.reward;
  j["doors_used"] = e.doors_used;
  j["balls_collected"] = e.balls_collected;
  j["exploit_return_after"] = e.exploit_return_after;
  return j;
}

Json to_json(const EpisodeEndRecord& end) {
  Json j;
  j["type"] = "episode_end";
  j["episode"] = end.episode;
  j["return"] = end.episode_return;
  j["exploit_return"] = end.exploit_return;
  j["coverage_pct"] = end.coverage_pct;
  j["final_observation"] = observation_to_json(end.final_observation);
  return j;
}

Json to_json(const RunSummary& s) {
  Json j;
  j["model"] = s.model;
  j["instruction"] = s.instruction;
  j["env_kind"] = s.env_kind;
  j["dims"] = s.dims;
  j["seed"] = s.seed;
  j["world_id"] = s.world_id;
  for (const auto& [name, value] : numeric_fields(s)) j[name] = value;
  // Integer-valued fields keep their integer type.
  for (const char* name : {"r_max", "exploit_return_final", "agent_return_final", "sample_efficiency",
                           "invalid_actions", "episodes", "interactions"}) {
    j[name] = static_cast<long long>(j[name].get<double>());
  }
  return j;
}

RunSummary summary_from_json(const Json& j) {
  RunSummary s;
  s.model = j.at("model").get<std::string>();
  s.instruction = j.at("instruction").get<std::string>();
  s.env_kind = j.at("env_kind").get<std::string>();
  s.dims = j.at("dims").get<std::string>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.world_id = j.at("world_id").get<std::string>();
  s.r_max = j.at("r_max").get<int>();
  s.exploit_return_final = j.at("exploit_return_final").get<int>();
  s.agent_return_mean = j.at("agent_return_mean").get<double>();
  s.agent_return_final = j.at("agent_return_final").get<int>();
  s.last = gaps_from_json(j, "last", GapScope::last_episode);
  s.mean = gaps_from_json(j, "mean", GapScope::mean_over_episodes);
  s.coverage_pct = j.at("coverage_pct").get<double>();
  s.redundancy = j.at("redundancy").get<double>();
  s.sample_efficiency = j.at("sample_efficiency").get<int>();
  s.invalid_actions = j.at("invalid_actions").get<int>();
  s.episodes = j.at("episodes").get<int>();
  s.interactions = j.at("interactions").get<int>();
  return s;
}

Json to_json(const RunLogFooter& footer) {
  Json j;
  j["type"] = "footer";
  j["summary"] = to_json(footer.summary);
  if (!footer.finished_at.empty()) j["finished_at"] = footer.finished_at;
  return j;
}

RunLog read_run_log(const std::filesystem::path& path, bool allow_partial) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open run log " + path.string());
  RunLog log;
  std::vector<EventRecord> pending;
  std::string line;
  std::uintmax_t offset = 0;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const bool terminated = !in.eof();
    offset += line.size() + (terminated ? 1 : 0);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !terminated) {
      if (allow_partial && in.peek() == std::char_traits<char>::eof()) break;  // torn tail
      throw std::runtime_error(where + ": malformed or unterminated line");
    }
    const std::string type = j.value("type", "");
    if (!have_header) {
      if (type != "header") throw std::runtime_error(where + ": run log must start with a header");
      log.header = header_from_json(j);
      have_header = true;
      log.complete_bytes = offset;
      continue;
    }
    if (log.footer) throw std::runtime_error(where + ": content after the footer");
    if (type == "event") {
      pending.push_back(event_from_json(j));
    } else if (type == "episode_end") {
      EpisodeEndRecord end;
      end.episode = j.at("episode").get<int>();
      end.episode_return = j.at("return").get<int>();
      end.exploit_return = j.at("exploit_return").get<int>();
      end.coverage_pct = j.at("coverage_pct").get<double>();
      end.final_observation = observation_from_json(j.at("final_observation"));
      if (end.episode != static_cast<int>(log.episodes.size()) + 1) {
        throw std::runtime_error(where + ": episodes out of order");
      }
      for (const auto& e : pending) {
        if (e.episode != end.episode) throw std::runtime_error(where + ": event of another episode");
      }
      log.events.insert(log.events.end(), pending.begin(), pending.end());
      pending.clear();
      log.episodes.push_back(std::move(end));
      log.complete_bytes = offset;
    } else if (type == "footer") {
      if (!pending.empty()) throw std::runtime_error(where + ": footer inside an episode");
      log.footer = RunLogFooter{summary_from_json(j.at("summary")), j.value("finished_at", "")};
      log.complete_bytes = offset;
    } else {
      throw std::runtime_error(where + ": unknown record type '" + type + "'");
    }
  }
  if (!have_header) throw std::runtime_error(path.string() + ": empty run log");
  if (!pending.empty() && !allow_partial) {
    throw std::runtime_error(path.string() + ": log ends inside an episode");
  }
  log.dropped_events = pending.size();
  return log;
}

History history_from_log(const RunLog& log) {
  History history;
  std::size_t next = 0;
  for (const auto& end : log.episodes) {
    Trajectory t;
    t.episode_index = end.episode;
    while (next < log.events.size() && log.events[next].episode == end.episode) {
      const auto& e = log.events[next++];
      t.events.push_back(Event{Observation{e.room, e.observation}, e.action, e.reward});
    }
    t.final_observation = end.final_observation;
    history.trajectories.push_back(std::move(t));
  }
  return history;
}

RunLogWriter::RunLogWriter(const std::filesystem::path& path, std::optional<std::uintmax_t> keep_bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  if (keep_bytes) {
    std::filesystem::resize_file(path, *keep_bytes);
    out_.open(path, std::ios::binary | std::ios::app);
  } else {
    out_.open(path, std::ios::binary | std::ios::trunc);
  }
  if (!out_) throw std::runtime_error("cannot write run log " + path.string());
}

void RunLogWriter::write(const Json& record) {
  out_ << record.dump() << '\n';
  out_.flush();
  if (!out_) throw std::runtime_error("run log write failed");
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace explorebench
