#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "explorebench/episode.hpp"
#include "explorebench/rng.hpp"
#include "explorebench/textio.hpp"

namespace explorebench {

struct LlmConfig {
  std::string endpoint_url;
  std::string model_name;
  double temperature = 0.1;
  int max_retries = 3;              // re-prompts after an unparsable reply
  double timeout_seconds = 60.0;
  double rate_limit_per_minute = 60.0;
  int transport_retries = 3;        // resends after a network or server error
  double backoff_seconds = 1.0;     // doubled after every failed send

  /// Throws std::invalid_argument on negative temperature or retries, or a
  /// non-positive timeout or rate limit.
  void validate() const;
};

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
};

/// Request body in the OpenAI-compatible chat-completion format.
std::string to_wire(const ChatRequest& request);
/// Extracts choices[0].message.content; throws TransportError if absent.
std::string parse_wire_reply(const std::string& body);

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sends one chat request and returns the assistant's text. Implementations
/// must be safe to call from several threads at once.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

/// Thread-safe token bucket: capacity and refill both equal to the per-minute
/// rate, so a full minute's worth of requests may burst.
class TokenBucket {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;

  explicit TokenBucket(double per_minute, Clock clock = std::chrono::steady_clock::now);

  bool try_acquire();
  /// Blocks until a token is available.
  void acquire();

 private:
  void refill();

  double per_second_;
  double capacity_;
  double tokens_;
  Clock clock_;
  std::chrono::steady_clock::time_point last_;
  std::mutex mutex_;
};

/// HTTP(S) transport. Reads the bearer token from EXPLOREBENCH_API_KEY at
/// construction. Retries network errors, 429 and 5xx answers with
/// exponential backoff, then throws TransportError.
class HttpTransport final : public ChatTransport {
 public:
  explicit HttpTransport(LlmConfig config);

  std::string complete(const ChatRequest& request) override;

 private:
  LlmConfig config_;
  std::string base_url_;
  std::string path_;
  std::string api_key_;
  TokenBucket bucket_;
};

/// Offline transport: replies are read in order from a JSONL file holding
/// one JSON string per line. Requests are recorded for inspection.
class ReplayTransport final : public ChatTransport {
 public:
  explicit ReplayTransport(std::vector<std::string> replies);
  static std::shared_ptr<ReplayTransport> load(const std::filesystem::path& path);

  /// Throws TransportError once the replies are exhausted.
  std::string complete(const ChatRequest& request) override;

  /// Discards the next `count` replies (used when resuming a run).
  void skip(std::size_t count);

  std::vector<ChatRequest> requests() const;
  std::size_t remaining() const;

 private:
  std::vector<std::string> replies_;
  std::size_t next_ = 0;
  std::vector<ChatRequest> requests_;
  mutable std::mutex mutex_;
};

/// Prompts a chat model with the full textual history. An unparsable reply
/// is answered with the invalid-action notice, up to max_retries times;
/// after that a uniform random legal action is taken.
class LlmPolicy final : public Policy {
 public:
  LlmPolicy(std::shared_ptr<ChatTransport> transport, LlmConfig config, Instruction instruction,
            std::uint64_t seed);

  std::string name() const override { return config_.model_name; }
  std::string kind() const override { return "llm"; }
  void begin_episode(int episode_index) override;
  Decision decide(const DecisionContext& ctx) override;

  const Instruction& instruction() const { return instruction_; }

 private:
  std::shared_ptr<ChatTransport> transport_;
  LlmConfig config_;
  Instruction instruction_;
  std::uint64_t seed_;
  Rng rng_;
};

/// Runs one extra episode in which the model sees `history` and is told to
/// exploit only. Returns that episode's return; `history` is not modified.
/// Throws std::invalid_argument on an empty history.
int llm_exploiter_eval(const History& history, const WorldSpec& world,
                       std::shared_ptr<ChatTransport> transport, const LlmConfig& config,
                       const Instruction& exploit_instruction, std::uint64_t seed,
                       int total_episodes = 20);

/// Paired per-episode points: the model's exploitation of each history
/// prefix next to the optimal exploitation of the same prefix.
struct ExploitComparisonPoint {
  int episode = 0;
  int llm_exploit = 0;
  int optimal_exploit = 0;
};

std::vector<ExploitComparisonPoint> exploit_comparison(
    const History& history, const WorldSpec& world, std::shared_ptr<ChatTransport> transport,
    const LlmConfig& config, const Instruction& exploit_instruction, std::uint64_t seed,
    int total_episodes = 20);

}  // namespace explorebench
