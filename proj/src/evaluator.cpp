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

#include "sentinel/evaluator.hpp"

#include <json.hpp>

#include "sentinel/error.hpp"
#include "sentinel/hashing.hpp"
#include "sentinel/prompt_forge.hpp"
#include "sentinel/version.hpp"
#include "sentinel/worker_pool.hpp"

namespace sentinel {

namespace {

const std::optional<Prediction>& selected(const EvalRecord& record, PredictionKind which,
                                          std::optional<Prediction>& clean_slot) {
  switch (which) {
    case PredictionKind::Adversarial:
      return record.adv_pred;
    case PredictionKind::Purified:
      return record.purified_pred;
    case PredictionKind::Clean:
      break;
  }
  clean_slot = record.clean_pred;
  return clean_slot;
}

std::string_view kind_name(PredictionKind which) {
  switch (which) {
    case PredictionKind::Clean:
      return "clean";
    case PredictionKind::Adversarial:
      return "adversarial";
    case PredictionKind::Purified:
      return "purified";
  }
  return "clean";
}

const Prediction& require(const EvalRecord& record, PredictionKind which,
                          std::optional<Prediction>& slot) {
  const auto& pred = selected(record, which, slot);
  if (!pred) {
    throw ContractError("record '" + record.example_id + "' has no " +
                        std::string(kind_name(which)) + " prediction");
  }
  return *pred;
}

template <typename Fn>
std::optional<double> maybe(Fn&& fn) {
  try {
    return fn();
  } catch (const UndefinedMetric&) {
    return std::nullopt;
  }
}

EvalRecord evaluate_one(const Example& x, const TaskSpec& spec, const ExperimentConfig& config,
                        const Agents& agents) {
  EvalRecord record;
  record.example_id = x.id;
  record.gold_label = x.gold_label;
  record.clean_pred = classify(x, spec, agents.target);

  Example to_purify = x;
  if (config.pipeline == Pipeline::Attack || config.pipeline == Pipeline::AttackThenDefend) {
    const auto& attack = config.attack;
    AttackOutcome outcome =
        attack.single
            ? perturb_one(x, builtin_instruction(*attack.single), spec, agents, attack.fewshot)
            : ensemble_attack(x, spec, agents, attack.fewshot, {attack.exhaustive});
    for (const auto& [source, message] : outcome.errors) {
      record.notes.push_back(source + ": " + message);
    }
    record.attack_source = outcome.source;
    record.adversarial_text = outcome.candidate.field(perturbable_field(spec));
    if (outcome.target_prediction) {
      record.adv_pred = *outcome.target_prediction;
    } else {
      // Failed generation leaves the input unchanged, so its clean prediction stands.
      record.adv_pred = record.clean_pred;
    }
    to_purify = outcome.candidate;
  }

  if (config.pipeline == Pipeline::AttackThenDefend || config.pipeline == Pipeline::DefendOnly) {
    const Purification purified = defend(to_purify, spec, agents, config.defense);
    if (purified.failure) record.notes.push_back("defense: " + *purified.failure);
    if (purified.icl_failure) record.notes.push_back("defense: " + *purified.icl_failure);
    record.purified_text = purified.example.field(perturbable_field(spec));
    record.purified_pred = classify(purified.example, spec, agents.target);
  }
  return record;
}

nlohmann::ordered_json endpoint_json(const AgentEndpoint& endpoint) {
  nlohmann::ordered_json out;
  out["backend"] = endpoint.backend ? endpoint.backend->id() : "";
  out["model"] = endpoint.model;
  out["temperature"] = endpoint.temperature;
  out["max_tokens"] = endpoint.max_tokens;
  out["seed"] = endpoint.seed ? nlohmann::ordered_json(*endpoint.seed) : nlohmann::ordered_json();
  return out;
}

}  // namespace

Prediction classify(const Example& x, const TaskSpec& spec, const AgentEndpoint& target) {
  const auto prompt = target_prompt(spec, x);
  const auto reply = target.ask({{Role::System, prompt.system}, {Role::User, prompt.user}});
  return Prediction{x.id, reply.content, normalize_label(reply.content, spec)};
}

double compute_asr(std::span<const EvalRecord> records, PredictionKind attacked) {
  std::size_t clean_correct = 0;
  std::size_t flipped = 0;
  std::optional<Prediction> slot;
  for (const auto& record : records) {
    const auto& attacked_pred = require(record, attacked, slot);
    if (!record.clean_pred.matches(record.gold_label)) continue;
    ++clean_correct;
    if (!attacked_pred.matches(record.gold_label)) ++flipped;
  }
  if (clean_correct == 0) throw UndefinedMetric("no cleanly-correct examples");
  return static_cast<double>(flipped) / static_cast<double>(clean_correct);
}

double compute_ra(std::span<const EvalRecord> records, PredictionKind which) {
  if (records.empty()) throw ContractError("robust accuracy over zero records");
  std::size_t correct = 0;
  std::optional<Prediction> slot;
  for (const auto& record : records) {
    if (require(record, which, slot).matches(record.gold_label)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

std::string_view pipeline_name(Pipeline pipeline) {
  switch (pipeline) {
    case Pipeline::CleanOnly:
      return "clean-only";
    case Pipeline::Attack:
      return "attack";
    case Pipeline::AttackThenDefend:
      return "attack-then-defend";
    case Pipeline::DefendOnly:
      return "defend-only";
    case Pipeline::Arena:
      return "arena";
  }
  return "clean-only";
}

Pipeline parse_pipeline(std::string_view name) {
  for (Pipeline p : {Pipeline::CleanOnly, Pipeline::Attack, Pipeline::AttackThenDefend,
                     Pipeline::DefendOnly, Pipeline::Arena}) {
    if (pipeline_name(p) == name) return p;
  }
  throw ContractError("unknown pipeline '" + std::string(name) + "'");
}

std::string AttackConfig::describe() const {
  const std::string prefix = fewshot.empty() ? "" : "FS-";
  if (single) return prefix + std::string(perturbation_name(*single));
  return "PromptAttack-" + prefix + "EN";
}

std::string config_digest(const TaskSpec& spec, const ExperimentConfig& config,
                          const Agents& agents) {
  nlohmann::ordered_json doc;
  doc["task"] = task_name(spec.id);
  doc["pipeline"] = pipeline_name(config.pipeline);
  doc["attack"]["strategy"] = config.attack.describe();
  doc["attack"]["exhaustive"] = config.attack.exhaustive;
  auto fewshot = nlohmann::ordered_json::array();
  for (const auto& pair : config.attack.fewshot) fewshot.push_back({pair.original, pair.adversarial});
  doc["attack"]["fewshot"] = std::move(fewshot);
  doc["defense"]["guidance"] = config.defense.guidance;
  doc["defense"]["icl_guidance"] = config.defense.icl_guidance;
  doc["defense"]["icl_max_rounds"] = config.defense.icl_max_rounds;
  if (config.pipeline == Pipeline::Arena) {
    doc["arena"]["iters"] = config.arena_iters;
    doc["arena"]["run_through_loops"] = config.run_through_loops;
  }
  doc["agents"]["target"] = endpoint_json(agents.target);
  doc["agents"]["defense"] = endpoint_json(agents.defense);
  doc["agents"]["attack"] = endpoint_json(agents.attack);

  FieldMap probe_fields;
  for (const auto& name : spec.field_names) probe_fields.emplace(name, "<" + name + ">");
  const Example probe = make_clean_example("probe", probe_fields, spec.label_list.front());
  auto prompts = nlohmann::ordered_json::array();
  auto add = [&](const PromptBundle& bundle) { prompts.push_back({bundle.system, bundle.user}); };
  add(target_prompt(spec, probe));
  add(defense_prompt(spec, probe, config.defense.guidance));
  if (!config.defense.icl_guidance.empty()) {
    add(icl_prompt(spec, probe, config.defense.icl_guidance.front()));
  }
  if (spec.label_list.size() > 1) {
    add(attack_agent_prompt(spec, probe, spec.label_list[0], spec.label_list[1]));
  }
  for (const auto& instruction : builtin_instructions()) {
    add(promptattack_prompt(spec, probe, instruction, config.attack.fewshot));
  }
  doc["prompts"] = std::move(prompts);
  return sha256_hex(doc.dump());
}

void fill_aggregates(RunReport& report, Pipeline pipeline) {
  std::vector<EvalRecord> included;
  for (const auto& record : report.per_example) {
    if (!record.excluded()) included.push_back(record);
  }
  report.n = report.per_example.size();
  report.excluded = report.n - included.size();
  report.standard_acc.reset();
  report.robust_acc.reset();
  report.asr.reset();
  report.undefended_robust_acc.reset();
  report.undefended_asr.reset();
  report.abstain_count = 0;
  for (const auto& record : included) {
    report.abstain_count += record.clean_pred.abstained() ? 1 : 0;
    if (record.adv_pred) report.abstain_count += record.adv_pred->abstained() ? 1 : 0;
    if (record.purified_pred) report.abstain_count += record.purified_pred->abstained() ? 1 : 0;
  }
  if (included.empty()) return;

  report.standard_acc = compute_ra(included, PredictionKind::Clean);
  switch (pipeline) {
    case Pipeline::CleanOnly:
    case Pipeline::Arena:
      break;
    case Pipeline::Attack:
      report.robust_acc = compute_ra(included, PredictionKind::Adversarial);
      report.asr = maybe([&] { return compute_asr(included, PredictionKind::Adversarial); });
      break;
    case Pipeline::AttackThenDefend:
      report.robust_acc = compute_ra(included, PredictionKind::Purified);
      report.asr = maybe([&] { return compute_asr(included, PredictionKind::Purified); });
      report.undefended_robust_acc = compute_ra(included, PredictionKind::Adversarial);
      report.undefended_asr =
          maybe([&] { return compute_asr(included, PredictionKind::Adversarial); });
      break;
    case Pipeline::DefendOnly:
      report.robust_acc = compute_ra(included, PredictionKind::Purified);
      break;
  }
}

RunReport run_experiment(const Dataset& dataset, const ExperimentConfig& config,
                         const Agents& agents) {
  if (dataset.examples.empty()) throw ContractError("cannot evaluate an empty dataset");
  if (config.pipeline == Pipeline::Arena) {
    throw ContractError("arena runs go through run_arena, not run_experiment");
  }
  config.defense.validate();
  const TaskSpec& spec = dataset.spec;

  RunReport report;
  report.task_id = std::string(task_name(spec.id));
  report.pipeline = std::string(pipeline_name(config.pipeline));
  if (config.pipeline == Pipeline::Attack || config.pipeline == Pipeline::AttackThenDefend) {
    report.attack = config.attack.describe();
  }
  report.defended =
      config.pipeline == Pipeline::AttackThenDefend || config.pipeline == Pipeline::DefendOnly;
  report.config_digest = config_digest(spec, config, agents);
  report.tool_version = std::string(kToolVersion);
  report.per_example.resize(dataset.examples.size());

  parallel_for(dataset.examples.size(), config.parallelism, [&](std::size_t i) {
    const Example& x = dataset.examples[i];
    try {
      report.per_example[i] = evaluate_one(x, spec, config, agents);
    } catch (const Error& e) {
      EvalRecord failed;
      failed.example_id = x.id;
      failed.gold_label = x.gold_label;
      failed.clean_pred.example_id = x.id;
      failed.error = e.what();
      report.per_example[i] = std::move(failed);
    }
  });

  fill_aggregates(report, config.pipeline);
  return report;
}

}  // namespace sentinel
