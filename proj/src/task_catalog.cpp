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

#include "sentinel/task_catalog.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sentinel/error.hpp"

namespace sentinel {

namespace {

constexpr std::string_view kMnliTask =
    "Does the relationship between the given sentences represent entailment, neutral, or "
    "contradiction? Respond with `entailment', `neutral', or `contradiction'.";
constexpr std::string_view kMnliInput = "Each example contains `premise' and `hypothesis'.";

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    cells.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return cells;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::string row_id(const TaskSpec& spec, std::size_t index) {
  return std::string(task_name(spec.id)) + "-" + std::to_string(index);
}

std::string checked_label(const TaskSpec& spec, std::string label, const std::string& where) {
  if (!spec.has_label(label)) {
    throw DataError(where + ": label '" + label + "' is not one of the task's labels");
  }
  return label;
}

Dataset load_tsv(std::istream& in, const TaskSpec& spec, const std::string& source) {
  std::string header_line;
  if (!std::getline(in, header_line)) throw DataError(source + ": empty file");
  strip_cr(header_line);
  const auto header = split_tabs(header_line);
  auto column_of = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError(source + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  std::vector<std::size_t> field_columns;
  for (const auto& name : spec.field_names) field_columns.push_back(column_of(name));
  const std::size_t label_column = column_of("label");

  Dataset dataset{spec, {}, source};
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split_tabs(line);
    const std::string where = source + ":" + std::to_string(line_no);
    if (cells.size() != header.size()) {
      throw DataError(where + ": expected " + std::to_string(header.size()) + " columns, got " +
                      std::to_string(cells.size()));
    }
    FieldMap fields;
    for (std::size_t i = 0; i < spec.field_names.size(); ++i) {
      fields.emplace(spec.field_names[i], cells[field_columns[i]]);
    }
    dataset.examples.push_back(make_clean_example(row_id(spec, dataset.examples.size()),
                                                  std::move(fields),
                                                  checked_label(spec, cells[label_column], where)));
  }
  if (dataset.examples.empty()) throw DataError(source + ": no data rows");
  return dataset;
}

Dataset load_jsonl(std::istream& in, const TaskSpec& spec, const std::string& source) {
  Dataset dataset{spec, {}, source};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(where + ": invalid JSON: " + e.what());
    }
    auto text_of = [&](const std::string& key) {
      if (!row.is_object() || !row.contains(key)) {
        throw DataError(where + ": missing field '" + key + "'");
      }
      if (!row[key].is_string()) throw DataError(where + ": field '" + key + "' is not a string");
      return row[key].get<std::string>();
    };
    FieldMap fields;
    for (const auto& name : spec.field_names) fields.emplace(name, text_of(name));
    dataset.examples.push_back(make_clean_example(row_id(spec, dataset.examples.size()),
                                                  std::move(fields),
                                                  checked_label(spec, text_of("label"), where)));
  }
  if (dataset.examples.empty()) throw DataError(source + ": empty file");
  return dataset;
}

}  // namespace

TaskSpec builtin_task(TaskId id) {
  TaskSpec spec;
  spec.id = id;
  switch (id) {
    case TaskId::SST2:
      spec.field_names = {"sentence"};
      spec.label_list = {"positive", "negative"};
      spec.task_description =
          "Analyze the tone of this statement and respond with either `positive' or `negative'.";
      spec.input_description = "Each example contains one `sentence'.";
      break;
    case TaskId::RTE:
      spec.field_names = {"sentence1", "sentence2"};
      spec.label_list = {"entailment", "not_entailment"};
      spec.task_description =
          "Are the following two sentences entailment or not_entailment? Answer me with "
          "`entailment' or `not_entailment', just one word.";
      spec.input_description = "Each example contains `sentence1' and `sentence2'.";
      break;
    case TaskId::QQP:
      spec.field_names = {"question1", "question2"};
      spec.label_list = {"equivalent", "not_equivalent"};
      spec.task_description =
          "Are the following two questions equivalent or not? Answer me with `equivalent' or "
          "`not_equivalent'.";
      spec.input_description = "Each example contains `question1' and `question2'.";
      break;
    case TaskId::QNLI:
      spec.field_names = {"question", "sentence"};
      spec.label_list = {"entailment", "not_entailment"};
      spec.task_description =
          "Given the question and context provided, determine if the answer can be inferred by "
          "choosing `entailment' or `not_entailment'.";
      spec.input_description = "Each example contains `question' and `sentence'.";
      break;
    case TaskId::MNLI_MM:
    case TaskId::MNLI_M:
      spec.field_names = {"premise", "hypothesis"};
      spec.label_list = {"entailment", "neutral", "contradiction"};
      spec.task_description = std::string(kMnliTask);
      spec.input_description = std::string(kMnliInput);
      break;
    default:
      throw ContractError("unknown task id");
  }
  return spec;
}

DataFormat parse_data_format(std::string_view name) {
  if (name == "tsv" || name == "TSV") return DataFormat::TSV;
  if (name == "jsonl" || name == "JSONL") return DataFormat::JSONL;
  throw ContractError("unknown data format '" + std::string(name) + "' (expected tsv or jsonl)");
}

Dataset load_dataset(const std::filesystem::path& path, const TaskSpec& spec, DataFormat format) {
  spec.validate();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset '" + path.string() + "'");
  return format == DataFormat::TSV ? load_tsv(in, spec, path.string())
                                   : load_jsonl(in, spec, path.string());
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path, DataFormat format) {
  std::ostringstream out;
  const auto& spec = dataset.spec;
  if (format == DataFormat::TSV) {
    for (const auto& name : spec.field_names) out << name << '\t';
    out << "label\n";
    for (const auto& example : dataset.examples) {
      for (const auto& name : spec.field_names) {
        const auto& text = example.field(name);
        if (text.find_first_of("\t\r\n") != std::string::npos) {
          throw DataError("example '" + example.id + "' field '" + name +
                          "' cannot be stored as TSV");
        }
        out << text << '\t';
      }
      out << example.gold_label.value_or("") << '\n';
    }
  } else {
    for (const auto& example : dataset.examples) {
      nlohmann::ordered_json row;
      for (const auto& name : spec.field_names) row[name] = example.field(name);
      row["label"] = example.gold_label.value_or("");
      out << row.dump() << '\n';
    }
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw DataError("cannot write dataset '" + path.string() + "'");
  file << out.str();
}

Dataset sample(const Dataset& dataset, std::size_t n, std::uint64_t seed) {
  const std::size_t size = dataset.examples.size();
  if (n == 0 || n > size) {
    throw ContractError("sample size " + std::to_string(n) + " out of range 1.." +
                        std::to_string(size));
  }
  // Partial Fisher-Yates on raw mt19937_64 output only.
  std::vector<std::size_t> order(size);
  for (std::size_t i = 0; i < size; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (size - i));
    std::swap(order[i], order[j]);
  }
  order.resize(n);
  std::sort(order.begin(), order.end());

  Dataset out{dataset.spec, {}, dataset.source_path};
  out.examples.reserve(n);
  for (std::size_t index : order) out.examples.push_back(dataset.examples[index]);
  return out;
}

}  // namespace sentinel
