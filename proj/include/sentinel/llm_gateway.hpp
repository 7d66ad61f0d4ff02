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

#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace sentinel {

enum class Role { System, User, Assistant };
std::string_view role_name(Role role);
Role parse_role(std::string_view name);

struct ChatMessage {
  Role role;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 256;
  std::optional<std::int64_t> seed;

  // Throws ContractError: messages empty, system anywhere but first, roles
  // not alternating user/assistant starting with user, temperature < 0,
  // max_tokens <= 0.
  void validate() const;

  std::string_view system_content() const;
  std::string_view last_user_content() const;
};

// Wire body for POST /v1/chat/completions (seed only when set).
nlohmann::json to_wire_json(const ChatRequest& req);

struct ChatResponse {
  std::string content;
  std::string backend_id;
  bool cached = false;
  double latency_ms = 0.0;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatResponse complete(const ChatRequest& req) = 0;
  virtual std::string id() const = 0;
};

// Validates the request, then delegates.
ChatResponse complete(ChatBackend& backend, const ChatRequest& req);

// Caps the number of requests in flight through the wrapped backend.
class ThrottledBackend final : public ChatBackend {
 public:
  ThrottledBackend(std::shared_ptr<ChatBackend> inner, std::size_t max_in_flight);

  ChatResponse complete(const ChatRequest& req) override;
  std::string id() const override { return inner_->id(); }

 private:
  std::shared_ptr<ChatBackend> inner_;
  std::size_t max_in_flight_;
  std::size_t in_flight_ = 0;
  std::mutex mu_;
  std::condition_variable cv_;
};

// Lowercase hex SHA-256 of (model, messages, temperature, max_tokens, seed)
// in a canonical JSON encoding.
std::string cache_key(const ChatRequest& req);

class ResponseCache {
 public:
  virtual ~ResponseCache() = default;
  virtual std::optional<std::string> lookup(const std::string& key) = 0;
  virtual void store(const std::string& key, const ChatRequest& req, const std::string& content) = 0;
};

class MemoryCache final : public ResponseCache {
 public:
  std::optional<std::string> lookup(const std::string& key) override;
  void store(const std::string& key, const ChatRequest& req, const std::string& content) override;
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::string, std::string> entries_;
};

// One JSON file per key under `dir`. Writes go through a temp file and a
// rename so concurrent writers of the same key never leave a torn file.
class DiskCache final : public ResponseCache {
 public:
  explicit DiskCache(std::filesystem::path dir);

  std::optional<std::string> lookup(const std::string& key) override;
  void store(const std::string& key, const ChatRequest& req, const std::string& content) override;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

// Hit: stored content with cached=true and no backend call. Miss: delegate
// and store. Cache I/O failures are logged and degrade to an uncached call.
ChatResponse cached_complete(ResponseCache& cache, ChatBackend& backend, const ChatRequest& req);

class CachedBackend final : public ChatBackend {
 public:
  CachedBackend(std::shared_ptr<ResponseCache> cache, std::shared_ptr<ChatBackend> inner)
      : cache_(std::move(cache)), inner_(std::move(inner)) {}

  ChatResponse complete(const ChatRequest& req) override {
    return cached_complete(*cache_, *inner_, req);
  }
  std::string id() const override { return inner_->id(); }

 private:
  std::shared_ptr<ResponseCache> cache_;
  std::shared_ptr<ChatBackend> inner_;
};

// Decoding parameters and backend for one agent role (target, defense, attack).
struct AgentEndpoint {
  std::shared_ptr<ChatBackend> backend;
  std::string model = "gpt-3.5-turbo-0613";
  double temperature = 0.0;
  int max_tokens = 256;
  std::optional<std::int64_t> seed;

  ChatRequest request(std::vector<ChatMessage> messages) const;
  ChatResponse ask(std::vector<ChatMessage> messages) const;
};

struct Agents {
  AgentEndpoint target;
  AgentEndpoint defense;
  AgentEndpoint attack;
};

}  // namespace sentinel
