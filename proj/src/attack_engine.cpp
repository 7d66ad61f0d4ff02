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

#include "sentinel/attack_engine.hpp"

#include <fstream>

#include <json.hpp>

#include "sentinel/classify.hpp"
#include "sentinel/error.hpp"

namespace sentinel {

namespace {

void require_attackable(const Example& x) {
  if (x.stage == Stage::Adversarial) {
    throw ContractError("cannot attack adversarial example '" + x.id + "'");
  }
  if (!x.gold_label) throw ContractError("example '" + x.id + "' has no gold label to attack");
}

AttackOutcome finish(const Example& x, const TaskSpec& spec, const Agents& agents,
                     const PromptBundle& prompt, std::optional<PerturbationId> instruction,
                     std::string source) {
  AttackOutcome outcome;
  outcome.source = std::move(source);
  const auto reply = agents.attack.ask({{Role::System, prompt.system}, {Role::User, prompt.user}});
  const std::string text = extract_generated_text(reply.content, spec);
  if (text.empty()) {
    outcome.candidate = x;
    outcome.errors.emplace_back(outcome.source, "attack LLM returned empty text");
    return outcome;
  }
  outcome.candidate = derive_example(x, {{perturbable_field(spec), text}}, Stage::Adversarial,
                                     instruction, !instruction.has_value());
  outcome.target_prediction = classify(outcome.candidate, spec, agents.target);
  outcome.flipped = !outcome.target_prediction->matches(x.gold_label);
  return outcome;
}

}  // namespace

AttackOutcome perturb_one(const Example& x, const PerturbationInstruction& instruction,
                          const TaskSpec& spec, const Agents& agents,
                          std::span<const FewShotPair> fewshot) {
  require_attackable(x);
  const auto prompt = promptattack_prompt(spec, x, instruction, fewshot);
  return finish(x, spec, agents, prompt, instruction.id,
                std::string(perturbation_name(instruction.id)));
}

AttackOutcome ensemble_attack(const Example& x, const TaskSpec& spec, const Agents& agents,
                              std::span<const FewShotPair> fewshot, EnsembleOptions options) {
  require_attackable(x);
  std::optional<AttackOutcome> first;
  std::optional<AttackOutcome> winner;
  std::vector<std::pair<std::string, std::string>> errors;
  for (const auto& instruction : builtin_instructions()) {
    AttackOutcome outcome = perturb_one(x, instruction, spec, agents, fewshot);
    errors.insert(errors.end(), outcome.errors.begin(), outcome.errors.end());
    if (!first) first = outcome;
    if (outcome.flipped && !winner) {
      winner = std::move(outcome);
      if (!options.exhaustive) break;
    }
  }
  AttackOutcome result = winner ? std::move(*winner) : std::move(*first);
  result.errors = std::move(errors);
  return result;
}

const std::string& incorrect_label_for(const TaskSpec& spec, const std::string& gold) {
  if (!spec.has_label(gold)) throw ContractError("gold label '" + gold + "' is not a task label");
  for (const auto& label : spec.label_list) {
    if (label != gold) return label;
  }
  throw ContractError("task has no label other than '" + gold + "'");
}

AttackOutcome agent_attack(const Example& purified, const TaskSpec& spec, const Agents& agents) {
  require_attackable(purified);
  const std::string& correct = *purified.gold_label;
  const auto prompt =
      attack_agent_prompt(spec, purified, correct, incorrect_label_for(spec, correct));
  return finish(purified, spec, agents, prompt, std::nullopt, "agent");
}

std::vector<FewShotPair> load_fewshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open few-shot file '" + path.string() + "'");
  std::vector<FewShotPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto row = nlohmann::json::parse(line, nullptr, false);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (row.is_discarded() || !row.is_object()) throw DataError(where + ": invalid JSON object");
    for (const char* key : {"original", "adversarial"}) {
      if (!row.contains(key) || !row[key].is_string()) {
        throw DataError(where + ": missing string '" + key + "'");
      }
    }
    pairs.push_back({row["original"].get<std::string>(), row["adversarial"].get<std::string>()});
  }
  return pairs;
}

std::filesystem::path fewshot_path(const std::filesystem::path& dir, TaskId task) {
  return dir / (std::string(task_name(task)) + ".jsonl");
}

}  // namespace sentinel
