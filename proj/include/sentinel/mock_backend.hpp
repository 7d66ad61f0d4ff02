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

#include <atomic>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sentinel/llm_gateway.hpp"

namespace sentinel {

// The text a scripted reply works on: the value of the last "<field>: <text>"
// line after the last "Input:" line of the final user turn (the whole turn if
// there is no such line). For every prompt this library renders, that is the
// perturbable field of the example being processed.
std::string request_subject(const ChatRequest& req);

using ReplyFn = std::function<std::string(const ChatRequest&)>;
using MatchFn = std::function<bool(std::string_view last_user, std::string_view system)>;

struct MockRule {
  MatchFn matches;
  ReplyFn reply;

  static MockRule when_user_contains(std::string needle, ReplyFn reply);
  static MockRule when_system_contains(std::string needle, ReplyFn reply);
};

// Reply builders over request_subject.
ReplyFn fixed_reply(std::string text);
ReplyFn echo_subject();
ReplyFn append_to_subject(std::string suffix);
ReplyFn replace_in_subject(std::string from, std::string to);
ReplyFn strip_subject_suffix(std::string suffix);
// k-th invocation returns replies[min(k, size-1)].
ReplyFn reply_sequence(std::vector<std::string> replies);

// Ordered rules, first match wins.
struct MockScript {
  std::vector<MockRule> rules;
  ReplyFn fallback;

  // Rule objects: {"match_substring_user"?, "match_substring_system"?, and one
  // of "reply": string, "replies": [string...], "transform": op-or-list}.
  // Ops: {"op": "echo"|"append"|"prepend"|"replace"|"strip_suffix", "text",
  // "from", "to"}. Top level is either a rule array or
  // {"rules": [...], "default_reply"?: string, "default_transform"?: op}.
  static MockScript from_json(const nlohmann::json& doc);
  static MockScript load(const std::filesystem::path& path);
};

// Deterministic scripted backend. Thread-safe; counts calls and keeps a log
// of every request it served.
class MockBackend final : public ChatBackend {
 public:
  explicit MockBackend(MockScript script, std::string id = "mock");

  ChatResponse complete(const ChatRequest& req) override;
  std::string id() const override { return id_; }

  std::size_t call_count() const { return calls_.load(); }
  std::vector<ChatRequest> requests() const;

 private:
  MockScript script_;
  std::string id_;
  std::atomic<std::size_t> calls_{0};
  mutable std::mutex mu_;
  std::vector<ChatRequest> log_;
};

}  // namespace sentinel
