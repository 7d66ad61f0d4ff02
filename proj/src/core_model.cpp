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

#include "sentinel/core_model.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_set>

#include "sentinel/error.hpp"

namespace sentinel {

namespace {

constexpr std::array<std::pair<TaskId, std::string_view>, 6> kTaskNames{{
    {TaskId::SST2, "sst2"},
    {TaskId::RTE, "rte"},
    {TaskId::QQP, "qqp"},
    {TaskId::QNLI, "qnli"},
    {TaskId::MNLI_MM, "mnli-mm"},
    {TaskId::MNLI_M, "mnli-m"},
}};

const std::array<PerturbationInstruction, 9> kInstructions{{
    {PerturbationId::C1, PerturbationLevel::Character,
     "Choose at most two words in the sentence, and change them so that they have typos."},
    {PerturbationId::C2, PerturbationLevel::Character,
     "Change at most two letters in the sentence."},
    {PerturbationId::C3, PerturbationLevel::Character,
     "Add at most two extraneous characters to the end of the sentence."},
    {PerturbationId::W1, PerturbationLevel::Word,
     "Replace at most two words in the sentence with synonyms."},
    {PerturbationId::W2, PerturbationLevel::Word,
     "Choose at most two words in the sentence that do not contribute to the meaning of the "
     "sentence and delete them."},
    {PerturbationId::W3, PerturbationLevel::Word,
     "Add at most two semantically neutral words to the sentence."},
    {PerturbationId::S1, PerturbationLevel::Sentence,
     "Add a randomly generated short meaningless handle after the sentence, such as @fasuv3."},
    {PerturbationId::S2, PerturbationLevel::Sentence, "Paraphrase the sentence."},
    {PerturbationId::S3, PerturbationLevel::Sentence,
     "Change the syntactic structure of the sentence."},
}};

constexpr std::array<std::string_view, 9> kPerturbationNames{"C1", "C2", "C3", "W1", "W2",
                                                             "W3", "S1", "S2", "S3"};

bool is_token_char(unsigned char c) {
  return std::isalnum(c) != 0 || c >= 0x80;
}

std::vector<std::string> split_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (is_token_char(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

// Lowercase, strip surrounding whitespace/punctuation, collapse internal
// whitespace runs into '_'.
std::string canonicalize(std::string_view raw) {
  auto trimmable = [](unsigned char c) { return std::isspace(c) || std::ispunct(c); };
  std::size_t begin = 0;
  std::size_t end = raw.size();
  while (begin < end && trimmable(static_cast<unsigned char>(raw[begin]))) ++begin;
  while (end > begin && trimmable(static_cast<unsigned char>(raw[end - 1]))) --end;
  std::string out;
  bool in_space = false;
  for (std::size_t i = begin; i < end; ++i) {
    const auto c = static_cast<unsigned char>(raw[i]);
    if (std::isspace(c)) {
      in_space = true;
      continue;
    }
    if (in_space) out.push_back('_');
    in_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

}  // namespace

std::string_view task_name(TaskId id) {
  for (const auto& [task, name] : kTaskNames) {
    if (task == id) return name;
  }
  throw ContractError("unknown task id");
}

TaskId parse_task_id(std::string_view name) {
  std::string lowered(name);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  std::replace(lowered.begin(), lowered.end(), '_', '-');
  if (lowered == "sst-2") lowered = "sst2";
  for (const auto& [task, task_str] : kTaskNames) {
    if (task_str == lowered) return task;
  }
  throw ContractError("unknown task '" + std::string(name) + "'");
}

void TaskSpec::validate() const {
  if (field_names.empty()) throw ContractError("task spec has no input fields");
  if (label_list.empty()) throw ContractError("task spec has an empty label list");
  std::set<std::string> seen;
  for (const auto& label : label_list) {
    if (!seen.insert(label).second) {
      throw ContractError("duplicate label '" + label + "' in task spec");
    }
  }
}

bool TaskSpec::has_label(std::string_view label) const {
  return std::find(label_list.begin(), label_list.end(), label) != label_list.end();
}

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::Clean:
      return "clean";
    case Stage::Adversarial:
      return "adversarial";
    case Stage::Purified:
      return "purified";
  }
  return "clean";
}

Stage parse_stage(std::string_view name) {
  if (name == "clean") return Stage::Clean;
  if (name == "adversarial") return Stage::Adversarial;
  if (name == "purified") return Stage::Purified;
  throw DataError("unknown stage '" + std::string(name) + "'");
}

std::string_view perturbation_name(PerturbationId id) {
  return kPerturbationNames[static_cast<std::size_t>(id)];
}

PerturbationId parse_perturbation(std::string_view name) {
  for (std::size_t i = 0; i < kPerturbationNames.size(); ++i) {
    if (kPerturbationNames[i] == name) return static_cast<PerturbationId>(i);
  }
  throw ContractError("unknown perturbation instruction '" + std::string(name) + "'");
}

const std::array<PerturbationInstruction, 9>& builtin_instructions() { return kInstructions; }

const PerturbationInstruction& builtin_instruction(PerturbationId id) {
  return kInstructions[static_cast<std::size_t>(id)];
}

const std::string& Example::field(const std::string& key) const {
  auto it = fields.find(key);
  if (it == fields.end()) throw DataError("example '" + id + "' has no field '" + key + "'");
  return it->second;
}

Example make_clean_example(std::string id, FieldMap fields,
                           std::optional<std::string> gold_label) {
  if (id.empty()) throw ContractError("example id must not be empty");
  if (fields.empty()) throw ContractError("example '" + id + "' has no fields");
  Example example;
  example.id = std::move(id);
  example.fields = std::move(fields);
  example.gold_label = std::move(gold_label);
  return example;
}

Example derive_example(const Example& parent, const FieldMap& new_fields, Stage stage,
                       std::optional<PerturbationId> perturbation, bool from_attack_agent) {
  if (stage == Stage::Clean) throw ContractError("derived examples cannot be Clean");
  if (stage == Stage::Adversarial && !perturbation && !from_attack_agent) {
    throw ContractError("adversarial example needs a perturbation or the attack-agent flag");
  }
  Example child;
  child.fields = parent.fields;
  for (const auto& [key, text] : new_fields) {
    auto it = child.fields.find(key);
    if (it == child.fields.end()) {
      throw DataError("cannot derive from '" + parent.id + "': unknown field '" + key + "'");
    }
    it->second = text;
  }
  std::string tag = "pur";
  if (stage == Stage::Adversarial) {
    tag = perturbation ? "adv-" + std::string(perturbation_name(*perturbation)) : "adv-agent";
  }
  child.id = parent.id + "/" + tag;
  child.gold_label = parent.gold_label;
  child.stage = stage;
  child.parent_id = parent.id;
  child.perturbation = perturbation;
  child.from_attack_agent = from_attack_agent;
  return child;
}

void check_fields(const Example& example, const TaskSpec& spec) {
  for (const auto& name : spec.field_names) {
    if (!example.fields.contains(name)) {
      throw DataError("example '" + example.id + "' is missing field '" + name + "'");
    }
  }
  for (const auto& [key, text] : example.fields) {
    if (std::find(spec.field_names.begin(), spec.field_names.end(), key) ==
        spec.field_names.end()) {
      throw DataError("example '" + example.id + "' has unexpected field '" + key + "'");
    }
  }
}

std::optional<std::string> normalize_label(std::string_view raw, const TaskSpec& spec) {
  const std::string canonical = canonicalize(raw);
  if (spec.has_label(canonical)) return canonical;

  struct Hit {
    std::size_t begin;
    std::size_t end;
    const std::string* label;
  };
  const auto tokens = split_tokens(canonical);
  std::vector<Hit> hits;
  for (const auto& label : spec.label_list) {
    const auto parts = split_tokens(label);
    if (parts.empty() || parts.size() > tokens.size()) continue;
    for (std::size_t start = 0; start + parts.size() <= tokens.size(); ++start) {
      if (std::equal(parts.begin(), parts.end(), tokens.begin() + static_cast<long>(start))) {
        hits.push_back({start, start + parts.size(), &label});
      }
    }
  }

  std::set<std::string> found;
  for (const auto& hit : hits) {
    const bool nested = std::any_of(hits.begin(), hits.end(), [&](const Hit& other) {
      return other.end - other.begin > hit.end - hit.begin && other.begin <= hit.begin &&
             hit.end <= other.end;
    });
    if (!nested) found.insert(*hit.label);
  }
  if (found.size() != 1) return std::nullopt;
  return *found.begin();
}

void ProvenanceIndex::add(const Example& example) { by_id_.insert_or_assign(example.id, example); }

const Example* ProvenanceIndex::find(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &it->second;
}

std::vector<const Example*> ProvenanceIndex::chain(const std::string& id) const {
  std::vector<const Example*> out;
  std::unordered_set<std::string> visited;
  const Example* current = find(id);
  if (current == nullptr) throw DataError("unknown example '" + id + "'");
  while (true) {
    if (!visited.insert(current->id).second) {
      throw DataError("provenance cycle through '" + current->id + "'");
    }
    out.push_back(current);
    if (!current->parent_id) break;
    const Example* parent = find(*current->parent_id);
    if (parent == nullptr) {
      throw DataError("example '" + current->id + "' links to missing parent '" +
                      *current->parent_id + "'");
    }
    current = parent;
  }
  if (out.back()->stage != Stage::Clean) {
    throw DataError("provenance chain of '" + id + "' is not rooted at a clean example");
  }
  return out;
}

}  // namespace sentinel
