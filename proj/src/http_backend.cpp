// Copyright 2026 The Sentinel Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "sentinel/http_backend.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "sentinel/error.hpp"
#include "sentinel/log.hpp"

namespace sentinel {

std::chrono::milliseconds RetryPolicy::backoff(int retry) const {
  const double scaled =
      static_cast<double>(initial_backoff.count()) * std::pow(multiplier, std::max(0, retry - 1));
  const double capped = std::min(scaled, static_cast<double>(max_backoff.count()));
  return std::chrono::milliseconds(static_cast<long long>(capped));
}

HttpBackendConfig HttpBackendConfig::from_env(std::string base_url) {
  HttpBackendConfig config;
  if (base_url.empty()) {
    const char* env = std::getenv("SENTINEL_BASE_URL");
    if (env == nullptr || *env == '\0') {
      throw ContractError("no base URL given and SENTINEL_BASE_URL is not set");
    }
    base_url = env;
  }
  config.base_url = std::move(base_url);
  if (const char* key = std::getenv("SENTINEL_API_KEY")) config.api_key = key;
  return config;
}

std::string parse_completion_body(const std::string& body) {
  const auto doc = nlohmann::json::parse(body, nullptr, false);
  if (doc.is_discarded()) throw ProtocolError("upstream reply is not valid JSON");
  if (!doc.is_object() || !doc.contains("choices") || !doc["choices"].is_array() ||
      doc["choices"].empty()) {
    throw ProtocolError("upstream reply has no choices");
  }
  const auto& choice = doc["choices"][0];
  if (!choice.is_object() || !choice.contains("message") || !choice["message"].is_object()) {
    throw ProtocolError("upstream reply has no choices[0].message");
  }
  const auto& message = choice["message"];
  if (!message.contains("content") || message["content"].is_null()) return "";
  if (!message["content"].is_string()) throw ProtocolError("message content is not a string");
  return message["content"].get<std::string>();
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  std::string url = config_.base_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) {
    throw ContractError("base URL '" + config_.base_url + "' lacks a scheme");
  }
  const auto slash = url.find('/', scheme + 3);
  origin_ = url.substr(0, slash);
  path_ = (slash == std::string::npos ? std::string() : url.substr(slash)) + "/v1/chat/completions";
  if (!config_.sleep) {
    config_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
  if (config_.retry.max_attempts < 1) throw ContractError("retry policy needs >= 1 attempt");
}

ChatResponse HttpBackend::complete(const ChatRequest& req) {
  const std::string body = to_wire_json(req).dump();
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  std::string last_failure;
  const auto start = std::chrono::steady_clock::now();
  for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
    if (attempt > 1) config_.sleep(config_.retry.backoff(attempt - 1));
    httplib::Client client(origin_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    auto result = client.Post(path_, headers, body, "application/json");
    if (!result) {
      last_failure = "request failed: " + httplib::to_string(result.error());
    } else if (result->status == 429 || result->status >= 500) {
      last_failure = "HTTP " + std::to_string(result->status);
    } else if (result->status != 200) {
      throw TransportError("HTTP " + std::to_string(result->status) + " from " + origin_ + path_ +
                           ": " + result->body.substr(0, 200));
    } else {
      ChatResponse response;
      response.content = parse_completion_body(result->body);
      response.backend_id = id();
      response.latency_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
              .count();
      return response;
    }
    log::warn("attempt " + std::to_string(attempt) + "/" +
              std::to_string(config_.retry.max_attempts) + " to " + origin_ + path_ + ": " +
              last_failure);
  }
  throw TransportError("retries exhausted for " + origin_ + path_ + ": " + last_failure);
}

}  // namespace sentinel
