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
#include <string>

#include <json.hpp>

#include "sentinel/evaluator.hpp"

namespace sentinel {

nlohmann::ordered_json example_to_json(const Example& example);
nlohmann::ordered_json prediction_to_json(const Prediction& pred);

nlohmann::ordered_json report_to_json(const RunReport& report);

// Parses and then checks that every stored aggregate equals the value
// recomputed from per_example; throws DataError on any mismatch.
RunReport report_from_json(const nlohmann::json& doc);

void write_report(const RunReport& report, const std::filesystem::path& path);
RunReport read_report(const std::filesystem::path& path);

// Table layout: one row per (attack, defense) setting with N, Acc, ASR and RA
// as percentages; arena reports add a Defense/Attack row pair per iteration.
std::string render_markdown(const RunReport& report);

}  // namespace sentinel
