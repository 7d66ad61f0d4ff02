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
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sentinel/defense_engine.hpp"
#include "sentinel/evaluator.hpp"

namespace sentinel {

struct ArenaRound {
  int iteration = 0;
  Example purified;
  Prediction purified_pred;
  Example adversarial;
  Prediction adversarial_pred;
};

enum class TerminalReason { MaxIterations, LoopDetected, Error };
std::string_view terminal_reason_name(TerminalReason reason);

struct ArenaTrace {
  std::string example_id;
  std::vector<ArenaRound> rounds;
  std::optional<int> loop_detected_at;
  TerminalReason terminal_reason = TerminalReason::MaxIterations;
  std::optional<std::string> error;
};

struct ArenaConfig {
  int max_iters = 5;
  DefenseConfig defense;
  // Keep iterating after a repeated round instead of stopping.
  bool run_through_loops = false;
  std::size_t parallelism = 4;
};

struct ArenaResult {
  std::vector<ArenaTrace> traces;
  // Clean classification of every starting example, for standard accuracy.
  std::vector<EvalRecord> records;
  std::vector<IterationMetrics> iterations;
};

// First iteration whose (purified, adversarial) field pair byte-equals the
// pair of an earlier iteration.
std::optional<int> detect_loop(const ArenaTrace& trace);

// Per example: iteration k purifies the current text (the clean example for
// k = 1, the previous adversarial example after that), classifies it, runs
// the attack agent on the purified example and classifies the result.
ArenaResult run_arena(const Dataset& dataset, const ArenaConfig& config, const Agents& agents);

// Defense / attack accuracy per iteration. Traces that stopped on a loop are
// at a fixed point and keep contributing their last round; traces that
// stopped on an error drop out after their last completed round.
std::vector<IterationMetrics> iteration_metrics(const std::vector<ArenaTrace>& traces);

nlohmann::ordered_json trace_to_json(const ArenaTrace& trace);
void write_traces(const std::vector<ArenaTrace>& traces, std::ostream& out);

// Arena run as a report: clean predictions per example plus per-iteration
// metrics.
RunReport arena_report(const Dataset& dataset, const ArenaConfig& config, const Agents& agents,
                       const ArenaResult& result);

}  // namespace sentinel
