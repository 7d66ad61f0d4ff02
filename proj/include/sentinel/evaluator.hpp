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
#include <span>
#include <string>
#include <vector>

#include "sentinel/attack_engine.hpp"
#include "sentinel/classify.hpp"
#include "sentinel/core_model.hpp"
#include "sentinel/defense_engine.hpp"
#include "sentinel/llm_gateway.hpp"
#include "sentinel/task_catalog.hpp"

namespace sentinel {

struct EvalRecord {
  std::string example_id;
  std::optional<std::string> gold_label;
  Prediction clean_pred;
  std::optional<Prediction> adv_pred;
  std::optional<Prediction> purified_pred;

  // Attack source ("C3", "agent", ...) and the texts actually classified.
  std::optional<std::string> attack_source;
  std::optional<std::string> adversarial_text;
  std::optional<std::string> purified_text;
  // Generation / purification failures that did not stop the example.
  std::vector<std::string> notes;
  // Set when the example failed outright; it is then left out of every metric.
  std::optional<std::string> error;

  bool excluded() const { return error.has_value(); }
};

enum class PredictionKind { Clean, Adversarial, Purified };

// Fraction of cleanly-correct records whose `attacked` prediction is wrong.
// Throws UndefinedMetric when no record is cleanly correct, ContractError when
// the selected prediction is missing on some record.
double compute_asr(std::span<const EvalRecord> records,
                   PredictionKind attacked = PredictionKind::Adversarial);

// Fraction of records whose selected prediction equals the gold label.
// Abstain counts as wrong. Throws ContractError on empty input or a missing
// prediction.
double compute_ra(std::span<const EvalRecord> records, PredictionKind which);

// Arena reports only carry clean predictions in per_example.
enum class Pipeline { CleanOnly, Attack, AttackThenDefend, DefendOnly, Arena };
std::string_view pipeline_name(Pipeline pipeline);
Pipeline parse_pipeline(std::string_view name);

struct AttackConfig {
  // Absent: ensemble over all nine instructions.
  std::optional<PerturbationId> single;
  std::vector<FewShotPair> fewshot;
  bool exhaustive = false;

  std::string describe() const;  // "PromptAttack-EN", "PromptAttack-FS-EN", "C3", "FS-C3"
};

struct ExperimentConfig {
  Pipeline pipeline = Pipeline::CleanOnly;
  AttackConfig attack;
  DefenseConfig defense;
  std::size_t parallelism = 4;
  // Arena pipeline only.
  int arena_iters = 0;
  bool run_through_loops = false;
};

struct IterationMetrics {
  int iteration = 0;
  std::size_t n = 0;
  double defense_acc = 0.0;
  double attack_acc = 0.0;
};

struct RunReport {
  std::string task_id;
  std::string pipeline;
  std::optional<std::string> attack;
  bool defended = false;
  std::size_t n = 0;
  std::size_t excluded = 0;
  std::optional<double> standard_acc;
  std::optional<double> robust_acc;
  std::optional<double> asr;
  // Under attack-then-defend: the same metrics with the defense bypassed.
  std::optional<double> undefended_robust_acc;
  std::optional<double> undefended_asr;
  std::size_t abstain_count = 0;
  std::vector<EvalRecord> per_example;
  // Arena runs only.
  std::vector<IterationMetrics> iterations;
  std::string config_digest;
  std::string tool_version;
};

// Stable hash over the task, pipeline, attack/defense configs, agent decoding
// parameters and backend ids, and probe renderings of every prompt template.
std::string config_digest(const TaskSpec& spec, const ExperimentConfig& config,
                          const Agents& agents);

// Recomputes every aggregate from per_example (records ordered by dataset
// index, excluded records skipped). Used both to build and to verify reports.
void fill_aggregates(RunReport& report, Pipeline pipeline);

// Per-example pipeline over a bounded worker pool; records keep dataset order.
RunReport run_experiment(const Dataset& dataset, const ExperimentConfig& config,
                         const Agents& agents);

}  // namespace sentinel
