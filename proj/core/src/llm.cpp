#include "explorebench/llm.hpp"

#include <algorithm>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "explorebench/agents.hpp"
#include "explorebench/oracle.hpp"

namespace explorebench {

void LlmConfig::validate() const {
  if (temperature < 0.0) throw std::invalid_argument("temperature must be non-negative");
  if (max_retries < 0) throw std::invalid_argument("max_retries must be non-negative");
  if (transport_retries < 0) throw std::invalid_argument("transport_retries must be non-negative");
  if (timeout_seconds <= 0.0) throw std::invalid_argument("timeout must be positive");
  if (rate_limit_per_minute <= 0.0) throw std::invalid_argument("rate_limit must be positive");
  if (backoff_seconds < 0.0) throw std::invalid_argument("backoff must be non-negative");
}

std::string to_wire(const ChatRequest& request) {
  nlohmann::ordered_json body;
  body["model"] = request.model;
  body["messages"] = nlohmann::ordered_json::array();
  for (const auto& m : request.messages) {
    body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  }
  body["temperature"] = request.temperature;
  return body.dump();
}

std::string parse_wire_reply(const std::string& body) {
  const auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) throw TransportError("reply is not JSON");
  const auto* content = [&]() -> const nlohmann::json* {
    if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) return nullptr;
    const auto& choice = j["choices"][0];
    if (!choice.contains("message") || !choice["message"].contains("content")) return nullptr;
    return &choice["message"]["content"];
  }();
  if (content == nullptr || !content->is_string()) {
    throw TransportError("reply lacks choices[0].message.content");
  }
  return content->get<std::string>();
}

TokenBucket::TokenBucket(double per_minute, Clock clock)
    : per_second_(per_minute / 60.0),
      capacity_(std::max(1.0, per_minute)),
      tokens_(capacity_),
      clock_(std::move(clock)),
      last_(clock_()) {
  if (per_minute <= 0.0) throw std::invalid_argument("rate limit must be positive");
}

void TokenBucket::refill() {
  const auto now = clock_();
  const double elapsed = std::chrono::duration<double>(now - last_).count();
  if (elapsed > 0.0) {
    tokens_ = std::min(capacity_, tokens_ + elapsed * per_second_);
    last_ = now;
  }
}

bool TokenBucket::try_acquire() {
  std::lock_guard lock(mutex_);
  refill();
  if (tokens_ < 1.0) return false;
  tokens_ -= 1.0;
  return true;
}

void TokenBucket::acquire() {
  while (true) {
    double wait_seconds = 0.0;
    {
      std::lock_guard lock(mutex_);
      refill();
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      wait_seconds = (1.0 - tokens_) / per_second_;
    }
    std::this_thread::sleep_for(std::chrono::duration<double>(wait_seconds));
  }
}

ReplayTransport::ReplayTransport(std::vector<std::string> replies) : replies_(std::move(replies)) {}

std::shared_ptr<ReplayTransport> ReplayTransport::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open replay file " + path.string());
  std::vector<std::string> replies;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_string()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected a JSON string");
    }
    replies.push_back(j.get<std::string>());
  }
  return std::make_shared<ReplayTransport>(std::move(replies));
}

std::string ReplayTransport::complete(const ChatRequest& request) {
  std::lock_guard lock(mutex_);
  requests_.push_back(request);
  if (next_ >= replies_.size()) throw TransportError("replay file exhausted");
  return replies_[next_++];
}

void ReplayTransport::skip(std::size_t count) {
  std::lock_guard lock(mutex_);
  if (count > replies_.size() - next_) throw TransportError("replay file shorter than the resumed log");
  next_ += count;
}

std::vector<ChatRequest> ReplayTransport::requests() const {
  std::lock_guard lock(mutex_);
  return requests_;
}

std::size_t ReplayTransport::remaining() const {
  std::lock_guard lock(mutex_);
  return replies_.size() - next_;
}

LlmPolicy::LlmPolicy(std::shared_ptr<ChatTransport> transport, LlmConfig config,
                     Instruction instruction, std::uint64_t seed)
    : transport_(std::move(transport)),
      config_(std::move(config)),
      instruction_(std::move(instruction)),
      seed_(seed),
      rng_(seed) {
  if (!transport_) throw std::invalid_argument("LLM policy needs a transport");
  config_.validate();
}

void LlmPolicy::begin_episode(int episode_index) {
  rng_ = Rng(mix_seed(seed_, static_cast<std::uint64_t>(episode_index)));
}

Decision LlmPolicy::decide(const DecisionContext& ctx) {
  const PromptSettings settings{ctx.world.door_budget, ctx.total_episodes};
  const PromptBundle first = render_prompt(ctx.history, ctx.current, instruction_, settings, ctx.legal);
  PromptBundle prompt = first;
  DecisionDiagnostics diag;
  const auto started = std::chrono::steady_clock::now();
  for (int attempt = 1; attempt <= config_.max_retries + 1; ++attempt) {
    if (attempt > 1) prompt = retry_prompt(first, attempt);
    ChatRequest request{config_.model_name, {{"user", prompt.full_text}}, config_.temperature};
    std::string reply = transport_->complete(request);
    ++diag.requests;
    diag.raw_replies.push_back(reply);
    ParseResult parsed = parse_action(reply, ctx.legal);
    if (auto* ref = std::get_if<ObjectRef>(&parsed)) {
      diag.latency_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
      return Decision{*ref, std::move(diag)};
    }
    ++diag.invalid_count;
  }
  diag.fallback = true;
  diag.latency_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return Decision{random_walk_choice(ctx.legal, rng_), std::move(diag)};
}

int llm_exploiter_eval(const History& history, const WorldSpec& world,
                       std::shared_ptr<ChatTransport> transport, const LlmConfig& config,
                       const Instruction& exploit_instruction, std::uint64_t seed,
                       int total_episodes) {
  if (history.empty()) throw std::invalid_argument("exploiter evaluation needs a nonempty history");
  LlmPolicy policy(std::move(transport), config, exploit_instruction, seed);
  const EpisodeEngine engine(world);
  return run_episode(engine, policy, history, total_episodes).episode_return();
}

std::vector<ExploitComparisonPoint> exploit_comparison(
    const History& history, const WorldSpec& world, std::shared_ptr<ChatTransport> transport,
    const LlmConfig& config, const Instruction& exploit_instruction, std::uint64_t seed,
    int total_episodes) {
  const WorldIndex index(world);
  const auto optimal = exploit_series(history, index, Granularity::per_episode);
  std::vector<ExploitComparisonPoint> points;
  History prefix;
  for (std::size_t i = 0; i < history.size(); ++i) {
    prefix.trajectories.push_back(history.trajectories[i]);
    const int llm = llm_exploiter_eval(prefix, world, transport, config, exploit_instruction,
                                       mix_seed(seed, i + 1), total_episodes);
    points.push_back({static_cast<int>(i) + 1, llm, optimal[i]});
  }
  return points;
}

}  // namespace explorebench
