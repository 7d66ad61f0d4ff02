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

#include "sentinel/arena.hpp"

#include <algorithm>

#include "sentinel/attack_engine.hpp"
#include "sentinel/classify.hpp"
#include "sentinel/error.hpp"
#include "sentinel/report.hpp"
#include "sentinel/version.hpp"
#include "sentinel/worker_pool.hpp"

namespace sentinel {

namespace {

ArenaTrace run_trace(const Example& start, const TaskSpec& spec, const ArenaConfig& config,
                     const Agents& agents) {
  ArenaTrace trace;
  trace.example_id = start.id;
  Example current = start;
  for (int iteration = 1; iteration <= config.max_iters; ++iteration) {
    try {
      ArenaRound round;
      round.iteration = iteration;
      const Purification purified = defend(current, spec, agents, config.defense);
      round.purified = purified.example;
      round.purified_pred = classify(round.purified, spec, agents.target);
      AttackOutcome attacked = agent_attack(round.purified, spec, agents);
      if (!attacked.target_prediction) {
        throw Error("attack agent produced no adversarial text at iteration " +
                    std::to_string(iteration));
      }
      round.adversarial = std::move(attacked.candidate);
      round.adversarial_pred = std::move(*attacked.target_prediction);
      current = round.adversarial;
      trace.rounds.push_back(std::move(round));
    } catch (const Error& e) {
      trace.terminal_reason = TerminalReason::Error;
      trace.error = e.what();
      return trace;
    }
    if (!trace.loop_detected_at) {
      trace.loop_detected_at = detect_loop(trace);
      if (trace.loop_detected_at && !config.run_through_loops) {
        trace.terminal_reason = TerminalReason::LoopDetected;
        return trace;
      }
    }
  }
  trace.terminal_reason = TerminalReason::MaxIterations;
  return trace;
}

}  // namespace

std::string_view terminal_reason_name(TerminalReason reason) {
  switch (reason) {
    case TerminalReason::MaxIterations:
      return "max_iterations";
    case TerminalReason::LoopDetected:
      return "loop_detected";
    case TerminalReason::Error:
      return "error";
  }
  return "error";
}

std::optional<int> detect_loop(const ArenaTrace& trace) {
  for (std::size_t k = 1; k < trace.rounds.size(); ++k) {
    const auto& round = trace.rounds[k];
    for (std::size_t j = 0; j < k; ++j) {
      const auto& earlier = trace.rounds[j];
      if (earlier.purified.fields == round.purified.fields &&
          earlier.adversarial.fields == round.adversarial.fields) {
        return round.iteration;
      }
    }
  }
  return std::nullopt;
}

std::vector<IterationMetrics> iteration_metrics(const std::vector<ArenaTrace>& traces) {
  std::size_t deepest = 0;
  for (const auto& trace : traces) deepest = std::max(deepest, trace.rounds.size());

  std::vector<IterationMetrics> out;
  for (std::size_t k = 0; k < deepest; ++k) {
    IterationMetrics metrics;
    metrics.iteration = static_cast<int>(k + 1);
    std::size_t defended = 0;
    std::size_t resisted = 0;
    for (const auto& trace : traces) {
      const ArenaRound* round = nullptr;
      if (k < trace.rounds.size()) {
        round = &trace.rounds[k];
      } else if (trace.terminal_reason == TerminalReason::LoopDetected && !trace.rounds.empty()) {
        round = &trace.rounds.back();
      }
      if (round == nullptr) continue;
      const auto& gold = round->purified.gold_label;
      ++metrics.n;
      defended += round->purified_pred.matches(gold) ? 1 : 0;
      resisted += round->adversarial_pred.matches(gold) ? 1 : 0;
    }
    if (metrics.n == 0) break;
    metrics.defense_acc = static_cast<double>(defended) / static_cast<double>(metrics.n);
    metrics.attack_acc = static_cast<double>(resisted) / static_cast<double>(metrics.n);
    out.push_back(metrics);
  }
  return out;
}

ArenaResult run_arena(const Dataset& dataset, const ArenaConfig& config, const Agents& agents) {
  if (config.max_iters < 1) throw ContractError("arena needs max_iters >= 1");
  if (dataset.examples.empty()) throw ContractError("arena over an empty dataset");
  config.defense.validate();
  const TaskSpec& spec = dataset.spec;

  ArenaResult result;
  result.traces.resize(dataset.examples.size());
  result.records.resize(dataset.examples.size());
  parallel_for(dataset.examples.size(), config.parallelism, [&](std::size_t i) {
    const Example& x = dataset.examples[i];
    EvalRecord& record = result.records[i];
    record.example_id = x.id;
    record.gold_label = x.gold_label;
    record.clean_pred.example_id = x.id;
    try {
      record.clean_pred = classify(x, spec, agents.target);
    } catch (const Error& e) {
      record.error = e.what();
      result.traces[i].example_id = x.id;
      result.traces[i].terminal_reason = TerminalReason::Error;
      result.traces[i].error = e.what();
      return;
    }
    result.traces[i] = run_trace(x, spec, config, agents);
  });
  result.iterations = iteration_metrics(result.traces);
  return result;
}

nlohmann::ordered_json trace_to_json(const ArenaTrace& trace) {
  nlohmann::ordered_json out;
  out["example_id"] = trace.example_id;
  auto rounds = nlohmann::ordered_json::array();
  for (const auto& round : trace.rounds) {
    nlohmann::ordered_json r;
    r["iteration"] = round.iteration;
    r["purified"] = example_to_json(round.purified);
    r["purified_pred"] = prediction_to_json(round.purified_pred);
    r["adversarial"] = example_to_json(round.adversarial);
    r["adversarial_pred"] = prediction_to_json(round.adversarial_pred);
    rounds.push_back(std::move(r));
  }
  out["rounds"] = std::move(rounds);
  out["loop_detected_at"] =
      trace.loop_detected_at ? nlohmann::ordered_json(*trace.loop_detected_at) : nullptr;
  out["terminal_reason"] = terminal_reason_name(trace.terminal_reason);
  out["error"] = trace.error ? nlohmann::ordered_json(*trace.error) : nullptr;
  return out;
}

void write_traces(const std::vector<ArenaTrace>& traces, std::ostream& out) {
  for (const auto& trace : traces) out << trace_to_json(trace).dump() << '\n';
}

RunReport arena_report(const Dataset& dataset, const ArenaConfig& config, const Agents& agents,
                       const ArenaResult& result) {
  ExperimentConfig digest_config;
  digest_config.pipeline = Pipeline::Arena;
  digest_config.defense = config.defense;
  digest_config.arena_iters = config.max_iters;
  digest_config.run_through_loops = config.run_through_loops;

  RunReport report;
  report.task_id = std::string(task_name(dataset.spec.id));
  report.pipeline = std::string(pipeline_name(Pipeline::Arena));
  report.attack = "agent";
  report.defended = true;
  report.per_example = result.records;
  report.iterations = result.iterations;
  report.config_digest = config_digest(dataset.spec, digest_config, agents);
  report.tool_version = std::string(kToolVersion);
  fill_aggregates(report, Pipeline::Arena);
  return report;
}

}  // namespace sentinel
