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

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sentinel/core_model.hpp"

namespace sentinel {

// A rendered prompt. Standalone prompts fill both roles; continuation prompts
// (icl_prompt) are appended to an existing conversation and leave `system`
// empty.
struct PromptBundle {
  std::string system;
  std::string user;

  bool operator==(const PromptBundle&) const = default;
};

// (original, adversarial) exemplar pair for the few-shot strategy.
struct FewShotPair {
  std::string original;
  std::string adversarial;
};

// The six rows of the default defense guidance, in order.
const std::vector<std::string>& default_defense_guidance();

// The field attacks rewrite and purification replaces: the last input field.
const std::string& perturbable_field(const TaskSpec& spec);

// "<field>: <text>" lines in spec order, no trailing newline. Throws
// DataError on a field mismatch or an empty field.
std::string serialize_fields(const Example& x, const TaskSpec& spec);

PromptBundle target_prompt(const TaskSpec& spec, const Example& x);

PromptBundle defense_prompt(const TaskSpec& spec, const Example& x,
                            std::span<const std::string> guidance);

PromptBundle icl_prompt(const TaskSpec& spec, const Example& x, std::string_view specific_guidance);

PromptBundle attack_agent_prompt(const TaskSpec& spec, const Example& purified,
                                 std::string_view correct_label, std::string_view incorrect_label);

PromptBundle promptattack_prompt(const TaskSpec& spec, const Example& x,
                                 const PerturbationInstruction& instruction,
                                 std::span<const FewShotPair> fewshot);

// Pulls the generated sentence out of an agent reply: the text after
// "<perturbable field>: " when some line carries that prefix, otherwise the
// whole reply. Surrounding whitespace is trimmed.
std::string extract_generated_text(std::string_view reply, const TaskSpec& spec);

}  // namespace sentinel
