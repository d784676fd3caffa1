#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "fixtures.hpp"

using namespace explorebench;
using testing::ball;
using testing::door;

namespace {

LlmConfig mock_config(int max_retries = 3) {
  LlmConfig c;
  c.endpoint_url = "http://127.0.0.1:1/v1/chat/completions";
  c.model_name = "mock-model";
  c.max_retries = max_retries;
  return c;
}

std::string wire_reply(const std::string& content) {
  return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

/// A local chat-completion endpoint answering with scripted statuses.
class FakeEndpoint {
 public:
  explicit FakeEndpoint(std::vector<int> statuses) : statuses_(std::move(statuses)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const std::size_t i = calls_++;
      {
        std::lock_guard lock(mutex_);
        bodies_.push_back(req.body);
        auth_.push_back(req.get_header_value("Authorization"));
      }
      const int status = i < statuses_.size() ? statuses_[i] : 200;
      res.status = status;
      if (status == 200) res.set_content(wire_reply("<tangerine door>"), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }
  std::size_t calls() const { return calls_; }
  std::vector<std::string> bodies() const {
    std::lock_guard lock(mutex_);
    return bodies_;
  }
  std::vector<std::string> auth() const {
    std::lock_guard lock(mutex_);
    return auth_;
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::vector<int> statuses_;
  std::atomic<std::size_t> calls_{0};
  mutable std::mutex mutex_;
  std::vector<std::string> bodies_;
  std::vector<std::string> auth_;
};

LlmConfig endpoint_config(const std::string& url) {
  LlmConfig c = mock_config();
  c.endpoint_url = url;
  c.backoff_seconds = 0.01;
  c.timeout_seconds = 5;
  c.rate_limit_per_minute = 6000;
  return c;
}

}  // namespace

TEST_CASE("wire format: request body and reply extraction") {
  const ChatRequest req{"m1", {{"user", "hello"}}, 0.1};
  const auto j = nlohmann::json::parse(to_wire(req));
  CHECK(j["model"] == "m1");
  CHECK(j["messages"].size() == 1);
  CHECK(j["messages"][0]["role"] == "user");
  CHECK(j["messages"][0]["content"] == "hello");
  CHECK(j["temperature"].get<double>() == doctest::Approx(0.1));
  CHECK(parse_wire_reply(wire_reply("<teal door>")) == "<teal door>");
  CHECK_THROWS_AS(parse_wire_reply("not json"), TransportError);
  CHECK_THROWS_AS(parse_wire_reply(R"({"choices":[]})"), TransportError);
  CHECK_THROWS_AS(parse_wire_reply(R"({"choices":[{"message":{"content":3}}]})"), TransportError);
}

TEST_CASE("config validation") {
  LlmConfig c = mock_config();
  CHECK_NOTHROW(c.validate());
  c.temperature = -0.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = mock_config();
  c.max_retries = -1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = mock_config();
  c.rate_limit_per_minute = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("token bucket: burst, refill and rate") {
  auto now = std::chrono::steady_clock::time_point{};
  TokenBucket bucket(60.0, [&] { return now; });
  for (int i = 0; i < 60; ++i) CHECK(bucket.try_acquire());
  CHECK_FALSE(bucket.try_acquire());
  now += std::chrono::milliseconds(500);
  CHECK_FALSE(bucket.try_acquire());
  now += std::chrono::milliseconds(500);
  CHECK(bucket.try_acquire());
  CHECK_FALSE(bucket.try_acquire());
  now += std::chrono::minutes(10);
  int burst = 0;
  while (bucket.try_acquire()) ++burst;
  CHECK(burst == 60);
  CHECK_THROWS_AS(TokenBucket(0.0), std::invalid_argument);
}

TEST_CASE("token bucket: concurrent acquisitions never exceed the capacity") {
  auto now = std::chrono::steady_clock::time_point{};
  std::mutex clock_mutex;
  TokenBucket bucket(100.0, [&] {
    std::lock_guard lock(clock_mutex);
    return now;
  });
  std::atomic<int> granted{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 50; ++i) granted += bucket.try_acquire() ? 1 : 0;
    });
  }
  for (auto& th : threads) th.join();
  CHECK(granted == 100);
}

TEST_CASE("replay transport: order, exhaustion, skip and file loading") {
  ReplayTransport t({"a", "b", "c"});
  const ChatRequest req{"m", {{"user", "x"}}, 0.1};
  CHECK(t.complete(req) == "a");
  t.skip(1);
  CHECK(t.complete(req) == "c");
  CHECK(t.remaining() == 0);
  CHECK_THROWS_AS(t.complete(req), TransportError);
  CHECK(t.requests().size() == 3);
  CHECK_THROWS_AS(t.skip(1), TransportError);

  const auto loaded = ReplayTransport::load(EXPLOREBENCH_TEST_FIXTURES "/transcript_replies.jsonl");
  CHECK(loaded->remaining() == 14);
  CHECK(loaded->complete(req) == "<dodger_blue door>");

  const auto dir = testing::scratch_dir("replay_transport");
  {
    std::ofstream bad(dir / "bad.jsonl");
    bad << "\"ok\"\n{\"not\": \"a string\"}\n";
  }
  CHECK_THROWS_AS(ReplayTransport::load(dir / "bad.jsonl"), std::runtime_error);
}

TEST_CASE("http transport: posts the wire format with the bearer key") {
  ::setenv("EXPLOREBENCH_API_KEY", "test-key", 1);
  FakeEndpoint endpoint({200});
  HttpTransport transport(endpoint_config(endpoint.url()));
  const ChatRequest req{"mock-model", {{"user", "prompt text"}}, 0.1};
  CHECK(transport.complete(req) == "<tangerine door>");
  REQUIRE(endpoint.calls() == 1);
  CHECK(endpoint.bodies()[0] == to_wire(req));
  CHECK(endpoint.auth()[0] == "Bearer test-key");
  ::unsetenv("EXPLOREBENCH_API_KEY");
}

TEST_CASE("http transport: retries 429 and 5xx, then gives up") {
  {
    FakeEndpoint endpoint({500, 429, 200});
    HttpTransport transport(endpoint_config(endpoint.url()));
    CHECK(transport.complete(ChatRequest{"m", {{"user", "p"}}, 0.1}) == "<tangerine door>");
    CHECK(endpoint.calls() == 3);
  }
  {
    FakeEndpoint endpoint({503, 503, 503, 503, 503});
    HttpTransport transport(endpoint_config(endpoint.url()));
    CHECK_THROWS_AS(transport.complete(ChatRequest{"m", {{"user", "p"}}, 0.1}), TransportError);
    CHECK(endpoint.calls() == 4);
  }
  {
    FakeEndpoint endpoint({400});
    HttpTransport transport(endpoint_config(endpoint.url()));
    CHECK_THROWS_AS(transport.complete(ChatRequest{"m", {{"user", "p"}}, 0.1}), TransportError);
    CHECK(endpoint.calls() == 1);
  }
}

TEST_CASE("http transport: unreachable endpoints raise TransportError") {
  LlmConfig c = endpoint_config("http://127.0.0.1:1/v1/chat/completions");
  c.transport_retries = 1;
  c.timeout_seconds = 1;
  HttpTransport transport(c);
  CHECK_THROWS_AS(transport.complete(ChatRequest{"m", {{"user", "p"}}, 0.1}), TransportError);
  CHECK_THROWS_AS(HttpTransport(endpoint_config("no-scheme")), std::invalid_argument);
}

TEST_CASE("http transport: concurrent requests share one client") {
  FakeEndpoint endpoint({});
  HttpTransport transport(endpoint_config(endpoint.url()));
  std::atomic<int> ok{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 5; ++i) ok += transport.complete(ChatRequest{"m", {{"user", "p"}}, 0.1}) == "<tangerine door>";
    });
  }
  for (auto& th : threads) th.join();
  CHECK(ok == 20);
  CHECK(endpoint.calls() == 20);
}

TEST_CASE("llm policy: a valid reply is taken as is") {
  const WorldSpec w = testing::transcript_world();
  auto transport = std::make_shared<ReplayTransport>(std::vector<std::string>{"<tangerine door>"});
  LlmPolicy policy(transport, mock_config(), InstructionSet{}.get(InstructionId::task_oriented), 1);
  const EpisodeEngine engine(w);
  const auto [state, obs] = engine.reset();
  const auto legal = engine.legal_actions(state);
  const History history;
  Trajectory current;
  current.episode_index = 1;
  current.final_observation = obs;
  policy.begin_episode(1);
  const Decision d = policy.decide(DecisionContext{w, history, current, state, obs, legal, 20});
  CHECK(d.action == door("tangerine"));
  CHECK(d.diagnostics.invalid_count == 0);
  CHECK(d.diagnostics.requests == 1);
  CHECK_FALSE(d.diagnostics.fallback);
  const auto requests = transport->requests();
  REQUIRE(requests.size() == 1);
  CHECK(requests[0].messages.size() == 1);
  CHECK(requests[0].messages[0].role == "user");
  CHECK(requests[0].temperature == doctest::Approx(0.1));
}

TEST_CASE("llm policy: garbage replies end in a random legal fallback") {
  const WorldSpec w = testing::transcript_world();
  auto transport = std::make_shared<ReplayTransport>(std::vector<std::string>{"hmm", "<purple>", "no idea", "<tangerine door>"});
  LlmPolicy policy(transport, mock_config(2), InstructionSet{}.get(InstructionId::task_oriented), 1);
  const EpisodeEngine engine(w);
  const auto [state, obs] = engine.reset();
  const auto legal = engine.legal_actions(state);
  const History history;
  Trajectory current;
  current.episode_index = 1;
  current.final_observation = obs;
  policy.begin_episode(1);
  const Decision d = policy.decide(DecisionContext{w, history, current, state, obs, legal, 20});
  CHECK(d.diagnostics.invalid_count == 3);
  CHECK(d.diagnostics.requests == 3);
  CHECK(d.diagnostics.fallback);
  CHECK(d.diagnostics.raw_replies == std::vector<std::string>{"hmm", "<purple>", "no idea"});
  CHECK(std::find(legal.begin(), legal.end(), d.action) != legal.end());
  const auto requests = transport->requests();
  CHECK(requests[1].messages[0].content.ends_with(std::string(kInvalidActionNotice)));
  CHECK(requests[2].messages[0].content == requests[1].messages[0].content);
  CHECK(transport->remaining() == 1);
}

TEST_CASE("llm policy: never more than max_retries + 1 requests per decision") {
  const WorldSpec w = generate_treasure_rooms(3, TreasureRoomsParams{{4, 4}, 0.01, 0.4});
  Rng rng(3);
  std::vector<std::string> replies;
  for (int i = 0; i < 3000; ++i) {
    replies.push_back(rng.bernoulli(0.5) ? "<door>" : (rng.bernoulli(0.5) ? "garbage" : "<ball>"));
  }
  auto transport = std::make_shared<ReplayTransport>(replies);
  LlmPolicy policy(transport, mock_config(3), InstructionSet{}.get(InstructionId::task_oriented), 3);
  const EpisodeEngine engine(w);
  History h;
  int decisions = 0;
  const StepObserver check = [&](const Event&, const EpisodeState&, const Observation&,
                                 const DecisionDiagnostics& d) {
    ++decisions;
    CHECK(d.requests <= 4);
    CHECK(d.requests == static_cast<int>(d.raw_replies.size()));
  };
  for (int e = 0; e < 5; ++e) h = append_history(std::move(h), run_episode(engine, policy, h, 20, check));
  CHECK(decisions > 0);
}

TEST_CASE("llm exploiter eval: replaying the oracle route attains the optimum") {
  const WorldSpec w = testing::transcript_world();
  const WorldIndex index(w);
  testing::SequencePolicy seq({door("dodger_blue"), door("cerulean"), ball("rosewood"), door("teal"),
                               ball("turquoise"), ball("khaki")});
  const History h = testing::run_episodes(w, seq, 1);
  const KnowledgeGraph known = build_graph(h, index);
  const ExploitSolution best = solve_knowledge(known, index);
  CHECK(best.value == 8);
  std::vector<std::string> replies;
  for (const auto& a : plan_route(known, index, best)) replies.push_back("<" + to_string(a) + ">");
  auto transport = std::make_shared<ReplayTransport>(replies);
  const Instruction exploit = InstructionSet{}.get(InstructionId::soft_lower);
  CHECK(llm_exploiter_eval(h, w, transport, mock_config(), exploit, 5) == best.value);
  CHECK(h.size() == 1);
  CHECK(transport->requests()[0].messages[0].content.find(std::string(kSoftLowerInstruction)) != std::string::npos);

  std::vector<std::string> shuttle(8, "<dodger_blue door>");
  CHECK(llm_exploiter_eval(h, w, std::make_shared<ReplayTransport>(shuttle), mock_config(), exploit, 5) <=
        best.value);
  CHECK_THROWS_AS(llm_exploiter_eval(History{}, w, transport, mock_config(), exploit, 5), std::invalid_argument);
}

TEST_CASE("exploit comparison pairs every history prefix with its optimum") {
  const WorldSpec w = generate_treasure_rooms(6, TreasureRoomsParams{{4, 4}, 0.01, 0.4});
  RandomWalkPolicy walk(6);
  const History h = testing::run_episodes(w, walk, 4);
  auto transport = std::make_shared<ReplayTransport>(std::vector<std::string>(400, "<door>"));
  const auto points = exploit_comparison(h, w, transport, mock_config(0), InstructionSet{}.get(InstructionId::soft_lower), 9);
  const WorldIndex index(w);
  const auto optimal = exploit_series(h, index, Granularity::per_episode);
  REQUIRE(points.size() == 4);
  for (std::size_t i = 0; i < points.size(); ++i) {
    CHECK(points[i].episode == static_cast<int>(i) + 1);
    CHECK(points[i].optimal_exploit == optimal[i]);
  }
}
