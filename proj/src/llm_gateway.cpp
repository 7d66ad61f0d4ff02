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

#include "sentinel/llm_gateway.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include "sentinel/error.hpp"
#include "sentinel/hashing.hpp"
#include "sentinel/log.hpp"

namespace sentinel {

std::string_view role_name(Role role) {
  switch (role) {
    case Role::System:
      return "system";
    case Role::User:
      return "user";
    case Role::Assistant:
      return "assistant";
  }
  return "user";
}

Role parse_role(std::string_view name) {
  if (name == "system") return Role::System;
  if (name == "user") return Role::User;
  if (name == "assistant") return Role::Assistant;
  throw ProtocolError("unknown chat role '" + std::string(name) + "'");
}

void ChatRequest::validate() const {
  if (messages.empty()) throw ContractError("chat request has no messages");
  if (temperature < 0.0) throw ContractError("temperature must be >= 0");
  if (max_tokens <= 0) throw ContractError("max_tokens must be positive");
  std::size_t first = messages.front().role == Role::System ? 1 : 0;
  if (first == messages.size()) throw ContractError("chat request has no user turn");
  for (std::size_t i = first; i < messages.size(); ++i) {
    const Role expected = (i - first) % 2 == 0 ? Role::User : Role::Assistant;
    if (messages[i].role != expected) {
      throw ContractError("message " + std::to_string(i) + " should have role '" +
                          std::string(role_name(expected)) + "'");
    }
  }
}

std::string_view ChatRequest::system_content() const {
  if (!messages.empty() && messages.front().role == Role::System) return messages.front().content;
  return {};
}

std::string_view ChatRequest::last_user_content() const {
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == Role::User) return it->content;
  }
  return {};
}

nlohmann::json to_wire_json(const ChatRequest& req) {
  nlohmann::ordered_json body;
  body["model"] = req.model;
  auto messages = nlohmann::ordered_json::array();
  for (const auto& message : req.messages) {
    messages.push_back({{"role", role_name(message.role)}, {"content", message.content}});
  }
  body["messages"] = std::move(messages);
  body["temperature"] = req.temperature;
  body["max_tokens"] = req.max_tokens;
  if (req.seed) body["seed"] = *req.seed;
  return nlohmann::json::parse(body.dump());
}

ChatResponse complete(ChatBackend& backend, const ChatRequest& req) {
  req.validate();
  return backend.complete(req);
}

ThrottledBackend::ThrottledBackend(std::shared_ptr<ChatBackend> inner, std::size_t max_in_flight)
    : inner_(std::move(inner)), max_in_flight_(max_in_flight) {
  if (!inner_) throw ContractError("throttled backend needs an inner backend");
  if (max_in_flight_ == 0) throw ContractError("parallelism bound must be >= 1");
}

ChatResponse ThrottledBackend::complete(const ChatRequest& req) {
  {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return in_flight_ < max_in_flight_; });
    ++in_flight_;
  }
  struct Release {
    ThrottledBackend* self;
    ~Release() {
      {
        std::lock_guard lock(self->mu_);
        --self->in_flight_;
      }
      self->cv_.notify_one();
    }
  } release{this};
  return inner_->complete(req);
}

std::string cache_key(const ChatRequest& req) {
  nlohmann::ordered_json material;
  material["model"] = req.model;
  auto messages = nlohmann::ordered_json::array();
  for (const auto& message : req.messages) {
    messages.push_back({role_name(message.role), message.content});
  }
  material["messages"] = std::move(messages);
  material["temperature"] = req.temperature;
  material["max_tokens"] = req.max_tokens;
  material["seed"] = req.seed ? nlohmann::ordered_json(*req.seed) : nlohmann::ordered_json();
  return sha256_hex(material.dump());
}

std::optional<std::string> MemoryCache::lookup(const std::string& key) {
  std::lock_guard lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void MemoryCache::store(const std::string& key, const ChatRequest&, const std::string& content) {
  std::lock_guard lock(mu_);
  entries_.insert_or_assign(key, content);
}

std::size_t MemoryCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

DiskCache::DiskCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::optional<std::string> DiskCache::lookup(const std::string& key) {
  const auto path = dir_ / (key + ".json");
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read cache entry " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const auto entry = nlohmann::json::parse(buffer.str(), nullptr, false);
  if (entry.is_discarded() || !entry.is_object() || !entry.contains("content") ||
      !entry["content"].is_string()) {
    throw DataError("corrupt cache entry " + path.string());
  }
  return entry["content"].get<std::string>();
}

void DiskCache::store(const std::string& key, const ChatRequest& req, const std::string& content) {
  static std::atomic<std::uint64_t> counter{0};
  std::filesystem::create_directories(dir_);
  nlohmann::ordered_json entry;
  entry["key"] = key;
  entry["request"] = to_wire_json(req);
  entry["content"] = content;
  std::ostringstream tmp_name;
  tmp_name << key << ".tmp." << std::this_thread::get_id() << "." << counter.fetch_add(1);
  const auto tmp = dir_ / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write cache entry " + tmp.string());
    out << entry.dump(2) << '\n';
    if (!out) throw DataError("short write to cache entry " + tmp.string());
  }
  std::filesystem::rename(tmp, dir_ / (key + ".json"));
}

ChatResponse cached_complete(ResponseCache& cache, ChatBackend& backend, const ChatRequest& req) {
  req.validate();
  const std::string key = cache_key(req);
  try {
    if (auto hit = cache.lookup(key)) {
      return ChatResponse{*hit, backend.id(), true, 0.0};
    }
  } catch (const std::exception& e) {
    log::warn(std::string("cache lookup failed, calling backend: ") + e.what());
  }
  ChatResponse response = backend.complete(req);
  try {
    cache.store(key, req, response.content);
  } catch (const std::exception& e) {
    log::warn(std::string("cache store failed: ") + e.what());
  }
  response.cached = false;
  return response;
}

ChatRequest AgentEndpoint::request(std::vector<ChatMessage> messages) const {
  ChatRequest req;
  req.model = model;
  req.messages = std::move(messages);
  req.temperature = temperature;
  req.max_tokens = max_tokens;
  req.seed = seed;
  return req;
}

ChatResponse AgentEndpoint::ask(std::vector<ChatMessage> messages) const {
  if (!backend) throw ContractError("agent endpoint has no backend");
  const auto start = std::chrono::steady_clock::now();
  ChatResponse response = complete(*backend, request(std::move(messages)));
  if (response.latency_ms == 0.0 && !response.cached) {
    response.latency_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return response;
}

}  // namespace sentinel
