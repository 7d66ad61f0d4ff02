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

#include "sentinel/mock_backend.hpp"

#include <cctype>
#include <fstream>
#include <memory>
#include <sstream>

#include "sentinel/error.hpp"

namespace sentinel {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    if (end == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

// "name: value" with name made of [A-Za-z0-9_]; returns value.
std::optional<std::string_view> field_value(std::string_view line) {
  const auto colon = line.find(": ");
  if (colon == 0 || colon == std::string_view::npos) return std::nullopt;
  for (std::size_t i = 0; i < colon; ++i) {
    const auto c = static_cast<unsigned char>(line[i]);
    if (!std::isalnum(c) && c != '_') return std::nullopt;
  }
  return line.substr(colon + 2);
}

std::string json_string(const nlohmann::json& obj, const char* key) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    throw DataError(std::string("mock script: expected string '") + key + "'");
  }
  return obj[key].get<std::string>();
}

ReplyFn parse_op(const nlohmann::json& op) {
  if (op.is_array()) {
    std::vector<ReplyFn> steps;
    for (const auto& step : op) steps.push_back(parse_op(step));
    if (steps.empty()) throw DataError("mock script: empty transform list");
    // Each step sees the previous step's output as its subject.
    return [steps](const ChatRequest& req) {
      std::string text = request_subject(req);
      for (const auto& step : steps) {
        ChatRequest staged;
        staged.messages.push_back({Role::User, "Input:\nsubject: " + text});
        text = step(staged);
      }
      return text;
    };
  }
  if (!op.is_object()) throw DataError("mock script: transform must be an object or list");
  const std::string kind = json_string(op, "op");
  if (kind == "echo") return echo_subject();
  if (kind == "append") return append_to_subject(json_string(op, "text"));
  if (kind == "prepend") {
    return [text = json_string(op, "text")](const ChatRequest& req) {
      return text + request_subject(req);
    };
  }
  if (kind == "replace") return replace_in_subject(json_string(op, "from"), json_string(op, "to"));
  if (kind == "strip_suffix") return strip_subject_suffix(json_string(op, "text"));
  throw DataError("mock script: unknown transform op '" + kind + "'");
}

MockRule parse_rule(const nlohmann::json& rule) {
  if (!rule.is_object()) throw DataError("mock script: rule must be an object");
  std::optional<std::string> user_needle;
  std::optional<std::string> system_needle;
  if (rule.contains("match_substring_user")) user_needle = json_string(rule, "match_substring_user");
  if (rule.contains("match_substring_system")) {
    system_needle = json_string(rule, "match_substring_system");
  }
  ReplyFn reply;
  if (rule.contains("reply")) {
    reply = fixed_reply(json_string(rule, "reply"));
  } else if (rule.contains("replies")) {
    std::vector<std::string> replies;
    for (const auto& r : rule["replies"]) {
      if (!r.is_string()) throw DataError("mock script: 'replies' must hold strings");
      replies.push_back(r.get<std::string>());
    }
    reply = reply_sequence(std::move(replies));
  } else if (rule.contains("transform")) {
    reply = parse_op(rule["transform"]);
  } else {
    throw DataError("mock script: rule needs 'reply', 'replies' or 'transform'");
  }
  MockRule out;
  out.reply = std::move(reply);
  out.matches = [user_needle, system_needle](std::string_view user, std::string_view system) {
    if (user_needle && user.find(*user_needle) == std::string_view::npos) return false;
    if (system_needle && system.find(*system_needle) == std::string_view::npos) return false;
    return true;
  };
  return out;
}

}  // namespace

std::string request_subject(const ChatRequest& req) {
  const auto lines = split_lines(req.last_user_content());
  std::size_t begin = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i] == "Input:") begin = i + 1;
  }
  std::optional<std::string_view> last;
  for (std::size_t i = begin; i < lines.size(); ++i) {
    if (auto value = field_value(lines[i])) last = value;
  }
  return std::string(last ? *last : req.last_user_content());
}

MockRule MockRule::when_user_contains(std::string needle, ReplyFn reply) {
  return {[needle = std::move(needle)](std::string_view user, std::string_view) {
            return user.find(needle) != std::string_view::npos;
          },
          std::move(reply)};
}

MockRule MockRule::when_system_contains(std::string needle, ReplyFn reply) {
  return {[needle = std::move(needle)](std::string_view, std::string_view system) {
            return system.find(needle) != std::string_view::npos;
          },
          std::move(reply)};
}

ReplyFn fixed_reply(std::string text) {
  return [text = std::move(text)](const ChatRequest&) { return text; };
}

ReplyFn echo_subject() {
  return [](const ChatRequest& req) { return request_subject(req); };
}

ReplyFn append_to_subject(std::string suffix) {
  return [suffix = std::move(suffix)](const ChatRequest& req) {
    return request_subject(req) + suffix;
  };
}

ReplyFn replace_in_subject(std::string from, std::string to) {
  if (from.empty()) throw ContractError("replace transform needs a non-empty 'from'");
  return [from = std::move(from), to = std::move(to)](const ChatRequest& req) {
    std::string text = request_subject(req);
    std::size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
      text.replace(pos, from.size(), to);
      pos += to.size();
    }
    return text;
  };
}

ReplyFn strip_subject_suffix(std::string suffix) {
  return [suffix = std::move(suffix)](const ChatRequest& req) {
    std::string text = request_subject(req);
    if (text.size() >= suffix.size() &&
        text.compare(text.size() - suffix.size(), suffix.size(), suffix) == 0) {
      text.resize(text.size() - suffix.size());
    }
    return text;
  };
}

ReplyFn reply_sequence(std::vector<std::string> replies) {
  if (replies.empty()) throw ContractError("reply sequence must not be empty");
  auto next = std::make_shared<std::atomic<std::size_t>>(0);
  return [replies = std::move(replies), next](const ChatRequest&) {
    const std::size_t k = next->fetch_add(1);
    return replies[std::min(k, replies.size() - 1)];
  };
}

MockScript MockScript::from_json(const nlohmann::json& doc) {
  MockScript script;
  const nlohmann::json* rules = &doc;
  if (doc.is_object()) {
    if (!doc.contains("rules")) throw DataError("mock script: missing 'rules'");
    rules = &doc["rules"];
    if (doc.contains("default_reply")) script.fallback = fixed_reply(json_string(doc, "default_reply"));
    if (doc.contains("default_transform")) script.fallback = parse_op(doc["default_transform"]);
  }
  if (!rules->is_array()) throw DataError("mock script: 'rules' must be an array");
  for (const auto& rule : *rules) script.rules.push_back(parse_rule(rule));
  return script;
}

MockScript MockScript::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open mock script '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const auto doc = nlohmann::json::parse(buffer.str(), nullptr, false);
  if (doc.is_discarded()) throw DataError("mock script '" + path.string() + "' is not valid JSON");
  return from_json(doc);
}

MockBackend::MockBackend(MockScript script, std::string id)
    : script_(std::move(script)), id_(std::move(id)) {}

ChatResponse MockBackend::complete(const ChatRequest& req) {
  calls_.fetch_add(1);
  {
    std::lock_guard lock(mu_);
    log_.push_back(req);
  }
  const auto user = req.last_user_content();
  const auto system = req.system_content();
  for (const auto& rule : script_.rules) {
    if (rule.matches(user, system)) return {rule.reply(req), id_, false, 0.0};
  }
  if (script_.fallback) return {script_.fallback(req), id_, false, 0.0};
  throw ScriptError("mock '" + id_ + "' has no rule for the request and no default reply");
}

std::vector<ChatRequest> MockBackend::requests() const {
  std::lock_guard lock(mu_);
  return log_;
}

}  // namespace sentinel
