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

#include "sentinel/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sentinel/error.hpp"

namespace sentinel {

namespace {

using ojson = nlohmann::ordered_json;

ojson optional_number(const std::optional<double>& value) {
  return value ? ojson(*value) : ojson();
}

template <typename T>
ojson optional_value(const std::optional<T>& value) {
  return value ? ojson(*value) : ojson();
}

ojson prediction_json(const Prediction& pred) { return prediction_to_json(pred); }

ojson record_json(const EvalRecord& record) {
  ojson out;
  out["example_id"] = record.example_id;
  out["gold_label"] = optional_value(record.gold_label);
  out["clean_pred"] = prediction_json(record.clean_pred);
  out["adv_pred"] = record.adv_pred ? prediction_json(*record.adv_pred) : ojson();
  out["purified_pred"] = record.purified_pred ? prediction_json(*record.purified_pred) : ojson();
  out["attack_source"] = optional_value(record.attack_source);
  out["adversarial_text"] = optional_value(record.adversarial_text);
  out["purified_text"] = optional_value(record.purified_text);
  out["notes"] = record.notes;
  out["error"] = optional_value(record.error);
  return out;
}

const nlohmann::json& member(const nlohmann::json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw DataError(std::string("report: missing '") + key + "'");
  }
  return obj[key];
}

std::string get_string(const nlohmann::json& obj, const char* key) {
  const auto& value = member(obj, key);
  if (!value.is_string()) throw DataError(std::string("report: '") + key + "' must be a string");
  return value.get<std::string>();
}

std::optional<std::string> get_optional_string(const nlohmann::json& obj, const char* key) {
  const auto& value = member(obj, key);
  if (value.is_null()) return std::nullopt;
  if (!value.is_string()) throw DataError(std::string("report: '") + key + "' must be a string");
  return value.get<std::string>();
}

std::optional<double> get_optional_number(const nlohmann::json& obj, const char* key) {
  const auto& value = member(obj, key);
  if (value.is_null()) return std::nullopt;
  if (!value.is_number()) throw DataError(std::string("report: '") + key + "' must be a number");
  const double number = value.get<double>();
  if (number < 0.0 || number > 1.0) {
    throw DataError(std::string("report: '") + key + "' is outside [0, 1]");
  }
  return number;
}

std::size_t get_count(const nlohmann::json& obj, const char* key) {
  const auto& value = member(obj, key);
  if (!value.is_number_unsigned()) {
    throw DataError(std::string("report: '") + key + "' must be a non-negative integer");
  }
  return value.get<std::size_t>();
}

Prediction parse_prediction(const nlohmann::json& obj) {
  return Prediction{get_string(obj, "example_id"), get_string(obj, "raw_text"),
                    get_optional_string(obj, "label")};
}

std::optional<Prediction> parse_optional_prediction(const nlohmann::json& obj, const char* key) {
  const auto& value = member(obj, key);
  if (value.is_null()) return std::nullopt;
  return parse_prediction(value);
}

EvalRecord parse_record(const nlohmann::json& obj) {
  EvalRecord record;
  record.example_id = get_string(obj, "example_id");
  record.gold_label = get_optional_string(obj, "gold_label");
  record.clean_pred = parse_prediction(member(obj, "clean_pred"));
  record.adv_pred = parse_optional_prediction(obj, "adv_pred");
  record.purified_pred = parse_optional_prediction(obj, "purified_pred");
  record.attack_source = get_optional_string(obj, "attack_source");
  record.adversarial_text = get_optional_string(obj, "adversarial_text");
  record.purified_text = get_optional_string(obj, "purified_text");
  for (const auto& note : member(obj, "notes")) {
    if (!note.is_string()) throw DataError("report: notes must be strings");
    record.notes.push_back(note.get<std::string>());
  }
  record.error = get_optional_string(obj, "error");
  return record;
}

std::string percent(const std::optional<double>& value) {
  if (!value) return "n/a";
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", *value * 100.0);
  return buffer;
}

}  // namespace

nlohmann::ordered_json prediction_to_json(const Prediction& pred) {
  ojson out;
  out["example_id"] = pred.example_id;
  out["raw_text"] = pred.raw_text;
  out["label"] = optional_value(pred.label);
  return out;
}

nlohmann::ordered_json example_to_json(const Example& example) {
  ojson out;
  out["id"] = example.id;
  ojson fields = ojson::object();
  for (const auto& [key, text] : example.fields) fields[key] = text;
  out["fields"] = std::move(fields);
  out["gold_label"] = optional_value(example.gold_label);
  out["stage"] = stage_name(example.stage);
  out["parent_id"] = optional_value(example.parent_id);
  out["perturbation"] =
      example.perturbation ? ojson(perturbation_name(*example.perturbation)) : ojson();
  out["from_attack_agent"] = example.from_attack_agent;
  return out;
}

nlohmann::ordered_json report_to_json(const RunReport& report) {
  ojson out;
  out["task_id"] = report.task_id;
  out["pipeline"] = report.pipeline;
  out["attack"] = optional_value(report.attack);
  out["defended"] = report.defended;
  out["n"] = report.n;
  out["excluded"] = report.excluded;
  out["standard_acc"] = optional_number(report.standard_acc);
  out["robust_acc"] = optional_number(report.robust_acc);
  out["asr"] = optional_number(report.asr);
  out["undefended_robust_acc"] = optional_number(report.undefended_robust_acc);
  out["undefended_asr"] = optional_number(report.undefended_asr);
  out["abstain_count"] = report.abstain_count;
  auto iterations = ojson::array();
  for (const auto& it : report.iterations) {
    iterations.push_back({{"iteration", it.iteration},
                          {"n", it.n},
                          {"defense_acc", it.defense_acc},
                          {"attack_acc", it.attack_acc}});
  }
  out["iterations"] = std::move(iterations);
  out["config_digest"] = report.config_digest;
  out["tool_version"] = report.tool_version;
  auto records = ojson::array();
  for (const auto& record : report.per_example) records.push_back(record_json(record));
  out["per_example"] = std::move(records);
  return out;
}

RunReport report_from_json(const nlohmann::json& doc) {
  RunReport report;
  report.task_id = get_string(doc, "task_id");
  report.pipeline = get_string(doc, "pipeline");
  report.attack = get_optional_string(doc, "attack");
  const auto& defended = member(doc, "defended");
  if (!defended.is_boolean()) throw DataError("report: 'defended' must be a boolean");
  report.defended = defended.get<bool>();
  report.n = get_count(doc, "n");
  report.excluded = get_count(doc, "excluded");
  report.standard_acc = get_optional_number(doc, "standard_acc");
  report.robust_acc = get_optional_number(doc, "robust_acc");
  report.asr = get_optional_number(doc, "asr");
  report.undefended_robust_acc = get_optional_number(doc, "undefended_robust_acc");
  report.undefended_asr = get_optional_number(doc, "undefended_asr");
  report.abstain_count = get_count(doc, "abstain_count");
  for (const auto& it : member(doc, "iterations")) {
    IterationMetrics metrics;
    const auto& iteration = member(it, "iteration");
    if (!iteration.is_number_integer()) throw DataError("report: iteration must be an integer");
    metrics.iteration = iteration.get<int>();
    metrics.n = get_count(it, "n");
    metrics.defense_acc = get_optional_number(it, "defense_acc").value_or(0.0);
    metrics.attack_acc = get_optional_number(it, "attack_acc").value_or(0.0);
    report.iterations.push_back(metrics);
  }
  report.config_digest = get_string(doc, "config_digest");
  report.tool_version = get_string(doc, "tool_version");
  const auto& records = member(doc, "per_example");
  if (!records.is_array()) throw DataError("report: 'per_example' must be an array");
  for (const auto& record : records) report.per_example.push_back(parse_record(record));

  Pipeline pipeline;
  try {
    pipeline = parse_pipeline(report.pipeline);
  } catch (const ContractError& e) {
    throw DataError(std::string("report: ") + e.what());
  }
  RunReport recomputed = report;
  fill_aggregates(recomputed, pipeline);
  auto check = [](bool same, const char* what) {
    if (!same) throw DataError(std::string("report: stored '") + what +
                               "' disagrees with per-example records");
  };
  check(recomputed.n == report.n, "n");
  check(recomputed.excluded == report.excluded, "excluded");
  check(recomputed.standard_acc == report.standard_acc, "standard_acc");
  check(recomputed.robust_acc == report.robust_acc, "robust_acc");
  check(recomputed.asr == report.asr, "asr");
  check(recomputed.undefended_robust_acc == report.undefended_robust_acc, "undefended_robust_acc");
  check(recomputed.undefended_asr == report.undefended_asr, "undefended_asr");
  check(recomputed.abstain_count == report.abstain_count, "abstain_count");
  return report;
}

void write_report(const RunReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write report '" + path.string() + "'");
  out << report_to_json(report).dump(2) << '\n';
}

RunReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open report '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const auto doc = nlohmann::json::parse(buffer.str(), nullptr, false);
  if (doc.is_discarded()) throw DataError("report '" + path.string() + "' is not valid JSON");
  return report_from_json(doc);
}

std::string render_markdown(const RunReport& report) {
  std::ostringstream out;
  out << "# Robustness report: " << report.task_id << "\n\n";
  out << "Pipeline: " << report.pipeline << "  \n";
  out << "Examples: " << report.n << " (excluded: " << report.excluded
      << ", abstentions: " << report.abstain_count << ")  \n";
  out << "Config digest: `" << report.config_digest << "`\n\n";

  out << "| Task | Attack | Defense | Acc (%) | ASR (%) | RA (%) |\n";
  out << "|---|---|---|---|---|---|\n";
  const std::string attack = report.attack.value_or("none");
  if (report.pipeline == "attack-then-defend") {
    out << "| " << report.task_id << " | " << attack << " | none | " << percent(report.standard_acc)
        << " | " << percent(report.undefended_asr) << " | "
        << percent(report.undefended_robust_acc) << " |\n";
  }
  out << "| " << report.task_id << " | " << attack << " | "
      << (report.defended ? "LLAMOS" : "none") << " | " << percent(report.standard_acc) << " | "
      << percent(report.asr) << " | " << percent(report.robust_acc) << " |\n";

  if (!report.iterations.empty()) {
    out << "\n| Agent |";
    for (const auto& it : report.iterations) out << " Iter. " << it.iteration << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < report.iterations.size(); ++i) out << "---|";
    out << "\n| Defense |";
    for (const auto& it : report.iterations) out << ' ' << percent(it.defense_acc) << " |";
    out << "\n| Attack |";
    for (const auto& it : report.iterations) out << ' ' << percent(it.attack_acc) << " |";
    out << '\n';
  }
  return out.str();
}

}  // namespace sentinel
