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

#pragma once

#include <chrono>
#include <functional>
#include <string>

#include "sentinel/llm_gateway.hpp"

namespace sentinel {

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{8000};

  // Delay before retry number `retry` (1-based).
  std::chrono::milliseconds backoff(int retry) const;
};

struct HttpBackendConfig {
  std::string base_url;  // scheme://host[:port][/prefix]
  std::string api_key;
  RetryPolicy retry;
  std::chrono::seconds timeout{60};
  // Injected so tests can run retry schedules without sleeping.
  std::function<void(std::chrono::milliseconds)> sleep;

  // base_url from SENTINEL_BASE_URL unless given, api_key from SENTINEL_API_KEY.
  static HttpBackendConfig from_env(std::string base_url = {});
};

// OpenAI-compatible chat completions over HTTP(S):
// POST {base_url}/v1/chat/completions, reply at choices[0].message.content.
// 429, 5xx, connection errors and timeouts are retried with exponential
// backoff; other statuses fail at once with TransportError.
class HttpBackend final : public ChatBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  ChatResponse complete(const ChatRequest& req) override;
  std::string id() const override { return "http:" + config_.base_url; }

 private:
  HttpBackendConfig config_;
  std::string origin_;
  std::string path_;
};

// Extracts choices[0].message.content; throws ProtocolError otherwise.
std::string parse_completion_body(const std::string& body);

}  // namespace sentinel
