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

#include "sentinel/defense_engine.hpp"

#include "sentinel/error.hpp"

namespace sentinel {

namespace {

void require_purifiable(const Example& x) {
  if (x.stage == Stage::Purified) {
    throw ContractError("example '" + x.id + "' is already purified");
  }
}

Example wrap(const Example& x, const TaskSpec& spec, const std::string& text) {
  return derive_example(x, {{perturbable_field(spec), text}}, Stage::Purified);
}

}  // namespace

void DefenseConfig::validate() const {
  if (guidance.empty()) throw ContractError("defense guidance must not be empty");
  if (icl_max_rounds < 0) throw ContractError("icl_max_rounds must be >= 0");
}

Purification purify(const Example& x, const TaskSpec& spec, const Agents& agents,
                    const DefenseConfig& cfg) {
  require_purifiable(x);
  cfg.validate();
  const auto prompt = defense_prompt(spec, x, cfg.guidance);
  Purification out;
  const auto reply = agents.defense.ask({{Role::System, prompt.system}, {Role::User, prompt.user}});
  out.llm_calls = 1;
  const std::string text = extract_generated_text(reply.content, spec);
  if (text.empty()) {
    out.example = derive_example(x, {}, Stage::Purified);
    out.failure = "defense LLM returned empty text";
    return out;
  }
  out.example = wrap(x, spec, text);
  return out;
}

Purification purify_with_icl(const Example& x, const TaskSpec& spec, const Agents& agents,
                             const DefenseConfig& cfg) {
  require_purifiable(x);
  cfg.validate();
  if (cfg.icl_guidance.empty()) throw ContractError("in-context guidance must not be empty");

  const auto prompt = defense_prompt(spec, x, cfg.guidance);
  std::vector<ChatMessage> conversation{{Role::System, prompt.system}, {Role::User, prompt.user}};
  Purification out;
  auto reply = agents.defense.ask(conversation);
  out.llm_calls = 1;
  std::string best = extract_generated_text(reply.content, spec);
  if (best.empty()) {
    out.example = derive_example(x, {}, Stage::Purified);
    out.failure = "defense LLM returned empty text";
    return out;
  }

  std::string previous_raw = reply.content;
  for (int round = 0; round < cfg.icl_max_rounds; ++round) {
    const auto& guidance = cfg.icl_guidance[static_cast<std::size_t>(round) % cfg.icl_guidance.size()];
    conversation.push_back({Role::Assistant, previous_raw});
    conversation.push_back({Role::User, icl_prompt(spec, x, guidance).user});
    ++out.llm_calls;
    ++out.icl_rounds;
    try {
      reply = agents.defense.ask(conversation);
    } catch (const TransportError& e) {
      out.icl_failure = std::string("in-context round failed: ") + e.what();
      break;
    }
    const std::string text = extract_generated_text(reply.content, spec);
    if (text.empty()) {
      out.icl_failure = "in-context round " + std::to_string(round + 1) + " returned empty text";
      break;
    }
    best = text;
    previous_raw = reply.content;
  }
  out.example = wrap(x, spec, best);
  return out;
}

Purification defend(const Example& x, const TaskSpec& spec, const Agents& agents,
                    const DefenseConfig& cfg) {
  return cfg.uses_icl() ? purify_with_icl(x, spec, agents, cfg) : purify(x, spec, agents, cfg);
}

}  // namespace sentinel
