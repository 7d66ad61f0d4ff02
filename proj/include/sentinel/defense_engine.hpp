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

#include <optional>
#include <string>
#include <vector>

#include "sentinel/core_model.hpp"
#include "sentinel/llm_gateway.hpp"
#include "sentinel/prompt_forge.hpp"

namespace sentinel {

struct DefenseConfig {
  std::vector<std::string> guidance = default_defense_guidance();
  // Specific-guidance strings, used one per round and cycled.
  std::vector<std::string> icl_guidance;
  int icl_max_rounds = 1;

  void validate() const;
  bool uses_icl() const { return !icl_guidance.empty() && icl_max_rounds > 0; }
};

struct Purification {
  // Always stage=Purified with parent_id = input id. On failure it carries
  // the input's text unchanged.
  Example example;
  std::optional<std::string> failure;
  // Set when an in-context round failed; the example holds the last good reply.
  std::optional<std::string> icl_failure;
  int llm_calls = 0;
  int icl_rounds = 0;
};

// Single defense-agent call.
Purification purify(const Example& x, const TaskSpec& spec, const Agents& agents,
                    const DefenseConfig& cfg);

// purify, then up to icl_max_rounds follow-ups in the same conversation:
// the previous reply goes back as the assistant turn, followed by an
// in-context-learning user turn. A failed round stops the loop and keeps the
// last good reply.
Purification purify_with_icl(const Example& x, const TaskSpec& spec, const Agents& agents,
                             const DefenseConfig& cfg);

// purify_with_icl when cfg.uses_icl(), purify otherwise.
Purification defend(const Example& x, const TaskSpec& spec, const Agents& agents,
                    const DefenseConfig& cfg);

}  // namespace sentinel
