#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "explorebench/llm.hpp"

namespace explorebench {

namespace {

/// Splits "https://host:port/v1/chat/completions" into the scheme-host-port
/// part and the path.
std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("endpoint URL lacks a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

}  // namespace

HttpTransport::HttpTransport(LlmConfig config)
    : config_(std::move(config)), bucket_(config_.rate_limit_per_minute) {
  config_.validate();
  std::tie(base_url_, path_) = split_url(config_.endpoint_url);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (base_url_.rfind("https://", 0) == 0) {
    throw std::invalid_argument("this build has no TLS support; cannot reach " + base_url_);
  }
#endif
  if (const char* key = std::getenv("EXPLOREBENCH_API_KEY")) api_key_ = key;
}

std::string HttpTransport::complete(const ChatRequest& request) {
  const std::string body = to_wire(request);
  const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
  double backoff = config_.backoff_seconds;
  std::string last_error;
  for (int attempt = 0; attempt <= config_.transport_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
      backoff *= 2.0;
    }
    bucket_.acquire();
    // One client per call keeps concurrent requests independent.
    httplib::Client client(base_url_);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    const auto result = client.Post(path_, headers, body, "application/json");
    if (!result) {
      last_error = httplib::to_string(result.error());
      continue;
    }
    if (result->status == 200) return parse_wire_reply(result->body);
    last_error = "HTTP " + std::to_string(result->status);
    if (!retryable_status(result->status)) break;
  }
  throw TransportError("chat request to " + config_.endpoint_url + " failed: " + last_error);
}

}  // namespace explorebench
