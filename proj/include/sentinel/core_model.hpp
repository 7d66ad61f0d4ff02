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

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sentinel {

enum class TaskId { SST2, RTE, QQP, QNLI, MNLI_MM, MNLI_M };

// CLI / file-name spelling: "sst2", "rte", "qqp", "qnli", "mnli-mm", "mnli-m".
std::string_view task_name(TaskId id);
TaskId parse_task_id(std::string_view name);

struct TaskSpec {
  TaskId id = TaskId::SST2;
  std::vector<std::string> field_names;
  std::vector<std::string> label_list;
  std::string task_description;
  std::string input_description;

  // Throws ContractError when label_list is empty or has duplicates, or
  // field_names is empty.
  void validate() const;
  bool has_label(std::string_view label) const;
};

enum class Stage { Clean, Adversarial, Purified };
std::string_view stage_name(Stage stage);
Stage parse_stage(std::string_view name);

enum class PerturbationId { C1, C2, C3, W1, W2, W3, S1, S2, S3 };
enum class PerturbationLevel { Character, Word, Sentence };

struct PerturbationInstruction {
  PerturbationId id;
  PerturbationLevel level;
  std::string_view text;
};

std::string_view perturbation_name(PerturbationId id);
PerturbationId parse_perturbation(std::string_view name);

// The nine PromptAttack instructions in canonical order C1..S3.
const std::array<PerturbationInstruction, 9>& builtin_instructions();
const PerturbationInstruction& builtin_instruction(PerturbationId id);

using FieldMap = std::map<std::string, std::string>;

// One text instance. Immutable by convention once built: derivations go
// through derive_example, which links the child back to its parent.
struct Example {
  std::string id;
  FieldMap fields;
  std::optional<std::string> gold_label;
  Stage stage = Stage::Clean;
  std::optional<std::string> parent_id;
  std::optional<PerturbationId> perturbation;
  bool from_attack_agent = false;

  const std::string& field(const std::string& key) const;
};

Example make_clean_example(std::string id, FieldMap fields,
                           std::optional<std::string> gold_label);

// Child ids are "<parent id>/<tag>" with tag "adv-<instr>", "adv-agent" or
// "pur". new_fields overrides a subset of the parent's fields; keys the parent
// does not carry are rejected.
Example derive_example(const Example& parent, const FieldMap& new_fields, Stage stage,
                       std::optional<PerturbationId> perturbation = std::nullopt,
                       bool from_attack_agent = false);

// Throws DataError naming the first key that differs from spec.field_names.
void check_fields(const Example& example, const TaskSpec& spec);

// Absent label means Abstain.
struct Prediction {
  std::string example_id;
  std::string raw_text;
  std::optional<std::string> label;

  bool abstained() const { return !label.has_value(); }
  bool matches(const std::optional<std::string>& gold) const {
    return label.has_value() && gold.has_value() && *label == *gold;
  }
};

// Maps a free-text model reply onto spec.label_list. Lowercases, trims
// whitespace and punctuation, joins internal whitespace with '_', then looks
// for labels occurring as whole token runs. Occurrences nested inside a longer
// label's occurrence are dropped ("not entailment" is not also "entailment").
// Zero or several distinct labels -> Abstain (nullopt).
std::optional<std::string> normalize_label(std::string_view raw, const TaskSpec& spec);

// Id-addressed store of examples, used to walk provenance chains.
class ProvenanceIndex {
 public:
  void add(const Example& example);
  const Example* find(const std::string& id) const;
  // Ancestors from `id` up to (and including) the Clean root. Throws
  // DataError on a missing link, a cycle, or a root that is not Clean.
  std::vector<const Example*> chain(const std::string& id) const;

 private:
  std::unordered_map<std::string, Example> by_id_;
};

}  // namespace sentinel
