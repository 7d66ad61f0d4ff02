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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sentinel/core_model.hpp"

namespace sentinel {

// The six built-in GLUE tasks. MNLI_M and MNLI_MM share every string.
TaskSpec builtin_task(TaskId id);

enum class DataFormat { TSV, JSONL };
DataFormat parse_data_format(std::string_view name);

struct Dataset {
  TaskSpec spec;
  std::vector<Example> examples;
  std::string source_path;
};

// Every row becomes a Clean example with id "<task>-<row index>". TSV needs a
// header naming spec.field_names and "label"; JSONL objects carry the same
// keys as strings.
Dataset load_dataset(const std::filesystem::path& path, const TaskSpec& spec, DataFormat format);

// Inverse of load_dataset. Throws DataError for TSV text containing a tab or
// newline, which the format cannot carry.
void save_dataset(const Dataset& dataset, const std::filesystem::path& path, DataFormat format);

// Deterministic n-subset for a fixed seed, in the dataset's original order.
Dataset sample(const Dataset& dataset, std::size_t n, std::uint64_t seed);

}  // namespace sentinel
