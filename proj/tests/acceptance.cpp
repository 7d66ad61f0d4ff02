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

// Acceptance suite: one PASS / FAIL / SKIP line per criterion, nonzero exit
// when a gating criterion fails.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "properties.hpp"
#include "sentinel/arena.hpp"
#include "sentinel/attack_engine.hpp"
#include "sentinel/classify.hpp"
#include "sentinel/cli.hpp"
#include "sentinel/defense_engine.hpp"
#include "sentinel/error.hpp"
#include "sentinel/evaluator.hpp"
#include "sentinel/log.hpp"
#include "sentinel/report.hpp"
#include "sentinel/task_catalog.hpp"
#include "support.hpp"

namespace sentinel::acceptance {
namespace {

namespace fs = std::filesystem;
using namespace sentinel::testing;

struct Skip {
  std::string why;
};

// Throws std::runtime_error with `what` unless `ok`.
void require(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error(what);
}

fs::path scratch(const std::string& name) {
  const fs::path dir =
      fs::temp_directory_path() / ("sentinel_acceptance_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// ---- 1. metric oracle -------------------------------------------------------

struct Row {
  const char* gold;
  const char* clean;
  const char* adv;
  const char* pur;
};

// "-" is an abstention.
constexpr Row kTwelve[] = {
    {"positive", "positive", "negative", "positive"}, {"positive", "positive", "positive", "positive"},
    {"negative", "negative", "positive", "negative"}, {"negative", "positive", "negative", "negative"},
    {"positive", "-", "positive", "positive"},        {"positive", "positive", "-", "negative"},
    {"negative", "negative", "negative", "positive"}, {"negative", "negative", "positive", "-"},
    {"positive", "negative", "negative", "positive"}, {"positive", "positive", "negative", "negative"},
    {"negative", "negative", "negative", "negative"}, {"negative", "-", "-", "negative"},
};

std::optional<std::string> label_of(const char* text) {
  if (std::string(text) == "-") return std::nullopt;
  return std::string(text);
}

std::vector<EvalRecord> twelve_records() {
  std::vector<EvalRecord> out;
  int i = 0;
  for (const Row& row : kTwelve) {
    EvalRecord r;
    r.example_id = "sst2-" + std::to_string(i++);
    r.gold_label = row.gold;
    r.clean_pred = Prediction{r.example_id, row.clean, label_of(row.clean)};
    r.adv_pred = Prediction{r.example_id + "/adv-C1", row.adv, label_of(row.adv)};
    r.purified_pred = Prediction{r.example_id + "/adv-C1/pur", row.pur, label_of(row.pur)};
    out.push_back(std::move(r));
  }
  return out;
}

// Indicator sums straight off the table, independent of the library.
struct Brute {
  int clean_correct = 0, adv_flips = 0, pur_flips = 0, adv_correct = 0, pur_correct = 0;
};

Brute brute_force(const std::vector<const Row*>& rows) {
  Brute b;
  auto eq = [](const char* a, const char* gold) { return std::string(a) == gold; };
  for (const Row* row : rows) {
    const int clean_ok = eq(row->clean, row->gold) ? 1 : 0;
    b.clean_correct += clean_ok;
    b.adv_flips += clean_ok * (eq(row->adv, row->gold) ? 0 : 1);
    b.pur_flips += clean_ok * (eq(row->pur, row->gold) ? 0 : 1);
    b.adv_correct += eq(row->adv, row->gold) ? 1 : 0;
    b.pur_correct += eq(row->pur, row->gold) ? 1 : 0;
  }
  return b;
}

void metric_oracle() {
  const auto records = twelve_records();
  std::vector<const Row*> rows;
  for (const Row& row : kTwelve) rows.push_back(&row);
  const Brute b = brute_force(rows);
  // Hand-enumerated counts for the table above.
  require(b.clean_correct == 8 && b.adv_flips == 5 && b.pur_flips == 4 && b.adv_correct == 5 &&
              b.pur_correct == 8,
          "brute-force counts disagree with the hand enumeration");

  const double n = 12.0;
  require(compute_asr(records, PredictionKind::Adversarial) == b.adv_flips / double(b.clean_correct),
          "ASR(adversarial)");
  require(compute_asr(records, PredictionKind::Purified) == b.pur_flips / double(b.clean_correct),
          "ASR(purified)");
  require(compute_ra(records, PredictionKind::Adversarial) == b.adv_correct / n, "RA(adversarial)");
  require(compute_ra(records, PredictionKind::Purified) == b.pur_correct / n, "RA(purified)");
  require(compute_ra(records, PredictionKind::Clean) == b.clean_correct / n, "standard accuracy");
  require(compute_asr(records) == 0.625 && compute_ra(records, PredictionKind::Adversarial) == 5.0 / 12.0,
          "frozen values");

  // Rows 4, 5, 9 and 12 are all cleanly wrong.
  std::vector<EvalRecord> wrong;
  for (int i : {3, 4, 8, 11}) wrong.push_back(records[static_cast<std::size_t>(i)]);
  bool undefined = false;
  try {
    compute_asr(wrong);
  } catch (const UndefinedMetric&) {
    undefined = true;
  }
  require(undefined, "zero-denominator ASR must raise UndefinedMetric");
  require(compute_ra(wrong, PredictionKind::Purified) == 4.0 / 4.0, "RA on cleanly-wrong subset");
}

// ---- 2. prompt fidelity -----------------------------------------------------

void prompt_fidelity() {
  std::size_t kinds = 0;
  for (const auto& [name, bundle] : golden_cases()) {
    const fs::path path = source_dir() / "prompts" / (name + ".txt");
    require(fs::exists(path), "missing golden " + path.string());
    require(render_bundle(bundle) == read_text(path), "golden mismatch: " + name);
    ++kinds;
  }
  require(kinds >= 6 * 3 + 1 + 9, "golden set incomplete");
  for (const auto& [name, needle] : verbatim_checks()) {
    require(read_text(source_dir() / "prompts" / (name + ".txt")).find(needle) != std::string::npos,
            name + " lacks verbatim text: " + needle);
  }
}

// ---- 3. purification replay ------------------------------------------------------

void purification_replay() {
  const Dataset ds = [] {
    Dataset d;
    d.spec = builtin_task(TaskId::SST2);
    d.examples.push_back(make_clean_example("sst2-0", {{"sentence", kMovieClean}}, "positive"));
    return d;
  }();
  ExperimentConfig cfg;
  cfg.pipeline = Pipeline::AttackThenDefend;
  cfg.attack.single = PerturbationId::C3;

  auto run = [&](const ExperimentConfig& c) {
    return run_experiment(ds, c,
                          make_agents(mock_from_file("suffix.json"),
                                      mock_from_file("icl_defender.json"),
                                      mock_from_file("c3_attacker.json")));
  };
  const RunReport plain = run(cfg);
  ExperimentConfig with_icl = cfg;
  with_icl.defense.icl_guidance = {":("};
  const RunReport icl = run(with_icl);

  const EvalRecord& a = plain.per_example.at(0);
  const EvalRecord& b = icl.per_example.at(0);
  require(a.clean_pred.label == "positive", "clean prediction");
  require(a.adv_pred && a.adv_pred->label == "negative", "C3-attacked prediction");
  require(a.adversarial_text == std::string(kMovieClean) + " :(", "C3 adversarial text");
  require(a.purified_pred && a.purified_pred->label == "negative", "defense without ICL");
  require(a.purified_text == std::string(kMovieClean) + " :(", "defense without ICL text");
  require(b.purified_pred && b.purified_pred->label == "positive", "defense with ICL");
  require(b.purified_text == "a fast , funny , highly enjoyable movie ..", "defense with ICL text");
}

// ---- 4. ensemble equivalence ------------------------------------------------

struct Scenario {
  std::string attacker;
  std::string target;
  Example x;
};

Scenario random_scenario(Gen& g) {
  static const std::vector<std::string> suffixes = {" :(", " :)", " !!", " @fasuv3", " meh", " lol"};
  static const std::vector<std::string> replies = {"positive", "negative", "unsure", "Negative."};
  nlohmann::json attack_rules = nlohmann::json::array();
  for (const auto& instruction : builtin_instructions()) {
    const std::size_t choice = g.below(suffixes.size() + 2);
    nlohmann::json rule;
    rule["match_substring_system"] = std::string(instruction.text);
    if (choice < suffixes.size()) {
      rule["transform"] = {{"op", "append"}, {"text", suffixes[choice]}};
    } else if (choice == suffixes.size()) {
      rule["reply"] = "";
    } else {
      rule["transform"] = {{"op", "echo"}};
    }
    attack_rules.push_back(rule);
  }
  nlohmann::json target_rules = nlohmann::json::array();
  for (const auto& suffix : suffixes) {
    if (g.coin()) {
      target_rules.push_back({{"match_substring_user", suffix}, {"reply", g.pick(replies)}});
    }
  }
  const std::string gold = g.coin() ? "positive" : "negative";
  Scenario s;
  s.attacker = nlohmann::json{{"rules", attack_rules}}.dump();
  s.target = nlohmann::json{{"rules", target_rules}, {"default_reply", gold}}.dump();
  s.x = make_clean_example("sst2-" + std::to_string(g.below(1000)),
                           {{"sentence", "movie number " + std::to_string(g.below(100000))}}, gold);
  return s;
}

void ensemble_equivalence() {
  const TaskSpec spec = builtin_task(TaskId::SST2);
  Gen g(2024);
  int flipped = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Scenario s = random_scenario(g);
    const Agents agents = make_agents(mock_from_json(s.target), nullptr, mock_from_json(s.attacker));
    bool any = false;
    std::optional<std::string> first_source;
    for (const auto& instruction : builtin_instructions()) {
      const AttackOutcome one = perturb_one(s.x, instruction, spec, agents);
      any = any || one.flipped;
      if (one.flipped && !first_source) first_source = one.source;
    }
    const std::string where = "scenario " + std::to_string(trial);
    for (bool exhaustive : {false, true}) {
      const AttackOutcome en = ensemble_attack(s.x, spec, agents, {}, {exhaustive});
      require(en.flipped == any, where + ": flipped differs from OR of singles");
      if (any) require(en.source == *first_source, where + ": not the first flipping instruction");
    }
    flipped += any ? 1 : 0;
  }
  require(flipped > 0 && flipped < 20, "scenarios must mix flipped and unflipped outcomes");
}

// ---- 5. arena ---------------------------------------------------------------

std::size_t row_cells(const std::string& markdown, const std::string& row) {
  std::istringstream in(markdown);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("| " + row + " |", 0) == 0) {
      return static_cast<std::size_t>(std::count(line.begin(), line.end(), '|')) - 2;
    }
  }
  return 0;
}

void arena_loops_and_shape() {
  Dataset loop_ds;
  loop_ds.spec = builtin_task(TaskId::SST2);
  loop_ds.examples.push_back(make_clean_example("sst2-0", {{"sentence", kArenaClean}}, "positive"));
  const ArenaResult looped =
      run_arena(loop_ds, ArenaConfig{},
                make_agents(mock_from_file("arena_classifier.json"),
                            mock_from_file("arena_defender.json"),
                            mock_from_file("arena_attacker.json")));
  const ArenaTrace& trace = looped.traces.at(0);
  require(trace.loop_detected_at == 3, "loop_detected_at should be 3");
  require(trace.terminal_reason == TerminalReason::LoopDetected, "terminal reason");
  require(trace.rounds.at(1).adversarial.field("sentence").find("depreciate") != std::string::npos,
          "iteration 2 adversarial text");

  const Dataset ds = load_dataset(source_dir() / "fixtures/sst2.tsv", builtin_task(TaskId::SST2),
                                  DataFormat::TSV);
  const ArenaConfig cfg;
  const Agents agents = make_agents(mock_from_file("suffix.json"), mock_from_file("echo.json"),
                                    mock_from_file("append_bang.json"));
  const ArenaResult result = run_arena(ds, cfg, agents);
  for (const auto& t : result.traces) require(!t.loop_detected_at, "unexpected loop");
  require(result.iterations.size() == 5, "expected 5 iteration metrics");
  const std::string md = render_markdown(arena_report(ds, cfg, agents, result));
  require(row_cells(md, "Defense") == 5, "Defense row should have 5 values");
  require(row_cells(md, "Attack") == 5, "Attack row should have 5 values");
}

// ---- 6. determinism and cache transparency ----------------------------------

void determinism() {
  const fs::path out = scratch("determinism");
  const std::string src = source_dir().string();
  const std::vector<std::string> args = {
      "evaluate", "--task", "sst2", "--data", src + "/fixtures/sst2.tsv", "--pipeline",
      "attack-then-defend", "--target", "mock:" + src + "/scripts/suffix.json", "--attack",
      "mock:" + src + "/scripts/append_sad.json", "--defense",
      "mock:" + src + "/scripts/strip_suffix.json", "--icl", ":(", "--out", out.string()};
  std::vector<std::string> reports;
  for (int pass = 0; pass < 3; ++pass) {
    if (pass == 2) fs::remove_all(out / "cache");
    std::ostringstream sink, err;
    require(cli::run(args, sink, err) == cli::kExitOk, "evaluate failed: " + err.str());
    reports.push_back(read_text(out / "report.json"));
  }
  require(!fs::is_empty(out / "cache" / "target"), "cache was not populated");
  require(reports[0] == reports[1], "second run differs (warm cache)");
  require(reports[0] == reports[2], "run after clearing the cache differs");
  fs::remove_all(out);
}

// ---- 7. invariants ----------------------------------------------------------

void invariants() {
  constexpr std::size_t kCases = 1000;
  const std::vector<std::pair<const char*, std::function<PropertyResult()>>> props = {
      {"normalize idempotence", [] { return normalize_idempotence(kCases, 101); }},
      {"provenance acyclicity", [] { return provenance_acyclicity(kCases, 102); }},
      {"RA = 1 - ASR at clean accuracy 1", [] { return ra_complements_asr(kCases, 103); }},
      {"bounded in-flight requests", [] { return bounded_in_flight(kCases, 104); }},
      {"metric permutation invariance", [] { return metric_permutation_invariance(kCases, 105); }},
  };
  for (const auto& [name, prop] : props) {
    const PropertyResult r = prop();
    require(r.cases >= kCases, std::string(name) + ": only " + std::to_string(r.cases) + " cases");
    require(r.ok(), std::string(name) + ": " + r.failure);
  }
}

// ---- 8. live smoke ----------------------------------------------------------

void live_smoke() {
  const char* base = std::getenv("SENTINEL_BASE_URL");
  if (base == nullptr || *base == '\0') throw Skip{"SENTINEL_BASE_URL not set"};
  const fs::path out = scratch("live");
  const std::string src = source_dir().string();
  std::ostringstream sink, err;
  const int code = cli::run({"classify", "--task", "sst2", "--data", src + "/fixtures/sst2.tsv",
                             "--target", "env", "--out", out.string(), "--no-cache"},
                            sink, err);
  require(code == cli::kExitOk, "classify against live endpoint failed: " + err.str());
  const RunReport report = read_report(out / "report.json");
  require(report.n == 4, "expected 4 records");
}

struct Criterion {
  int number;
  const char* name;
  double budget_s;
  bool gating;
  std::function<void()> run;
};

}  // namespace
}  // namespace sentinel::acceptance

int main() {
  using namespace sentinel::acceptance;
  sentinel::log::set_level(sentinel::log::Level::Error);
  const std::vector<Criterion> criteria = {
      {1, "metric oracle", 1.0, true, metric_oracle},
      {2, "prompt fidelity", 1.0, true, prompt_fidelity},
      {3, "purification replay", 5.0, true, purification_replay},
      {4, "ensemble equivalence", 10.0, true, ensemble_equivalence},
      {5, "arena loops and shape", 5.0, true, arena_loops_and_shape},
      {6, "determinism and cache transparency", 10.0, true, determinism},
      {7, "invariant suite", 60.0, true, invariants},
      {8, "live smoke (non-gating)", 120.0, false, live_smoke},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string status = "PASS";
    std::string detail;
    try {
      c.run();
    } catch (const Skip& s) {
      status = "SKIP";
      detail = s.why;
    } catch (const std::exception& e) {
      status = "FAIL";
      detail = e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (status == "PASS" && elapsed > c.budget_s) {
      status = "FAIL";
      detail = "over time budget of " + std::to_string(c.budget_s) + " s";
    }
    if (status == "FAIL" && c.gating) ++failed;
    char timing[32];
    std::snprintf(timing, sizeof(timing), "%.3fs", elapsed);
    std::cout << status << "  criterion " << c.number << ": " << c.name << " (" << timing << ")";
    if (!detail.empty()) std::cout << "  " << detail;
    std::cout << '\n';
  }
  std::cout << (failed == 0 ? "all gating criteria passed" : std::to_string(failed) + " gating criteria failed")
            << '\n';
  return failed == 0 ? 0 : 1;
}
