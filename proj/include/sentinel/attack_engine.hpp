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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sentinel/core_model.hpp"
#include "sentinel/llm_gateway.hpp"
#include "sentinel/prompt_forge.hpp"

namespace sentinel {

struct AttackOutcome {
  Example candidate;
  // target_prediction present and its label differs from the gold label.
  bool flipped = false;
  // "C1".."S3", or "agent" for the attack agent.
  std::string source;
  // Absent when the attack LLM produced nothing usable.
  std::optional<Prediction> target_prediction;
  // (source, message) for every candidate whose generation failed.
  std::vector<std::pair<std::string, std::string>> errors;
};

// One PromptAttack instruction: render, ask the attack LLM for the rewritten
// perturbable field, derive the Adversarial child, classify it. An empty reply
// is recorded in `errors` and yields flipped=false with candidate = x.
AttackOutcome perturb_one(const Example& x, const PerturbationInstruction& instruction,
                          const TaskSpec& spec, const Agents& agents,
                          std::span<const FewShotPair> fewshot = {});

struct EnsembleOptions {
  // Keep running the remaining instructions after the first flip.
  bool exhaustive = false;
};

// Runs C1..S3 in order and returns the first flipped outcome, or the C1
// outcome when none flips. Generation errors of every instruction tried are
// collected on the returned outcome.
AttackOutcome ensemble_attack(const Example& x, const TaskSpec& spec, const Agents& agents,
                              std::span<const FewShotPair> fewshot = {},
                              EnsembleOptions options = {});

// The first label in label_list order that is not `gold`.
const std::string& incorrect_label_for(const TaskSpec& spec, const std::string& gold);

// Attack agent on a purified example.
AttackOutcome agent_attack(const Example& purified, const TaskSpec& spec, const Agents& agents);

// JSONL of {"original", "adversarial"} string pairs.
std::vector<FewShotPair> load_fewshot(const std::filesystem::path& path);
std::filesystem::path fewshot_path(const std::filesystem::path& dir, TaskId task);

}  // namespace sentinel
