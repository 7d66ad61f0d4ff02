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

#include "sentinel/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sentinel/arena.hpp"
#include "sentinel/error.hpp"
#include "sentinel/evaluator.hpp"
#include "sentinel/hashing.hpp"
#include "sentinel/http_backend.hpp"
#include "sentinel/log.hpp"
#include "sentinel/mock_backend.hpp"
#include "sentinel/report.hpp"
#include "sentinel/task_catalog.hpp"
#include "sentinel/version.hpp"

namespace sentinel::cli {

namespace {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

class UsageError : public Error {
 public:
  using Error::Error;
};

std::vector<int> parse_rows(const std::string& text) {
  std::vector<int> rows;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(std::remove(item.begin(), item.end(), ' '), item.end());
    if (item.empty()) continue;
    int row = 0;
    try {
      row = std::stoi(item);
    } catch (const std::exception&) {
      throw DataError("guidance row '" + item + "' is not a number");
    }
    if (row < 1 || row > static_cast<int>(default_defense_guidance().size())) {
      throw DataError("guidance row " + item + " is outside 1..6");
    }
    rows.push_back(row);
  }
  return rows;
}

std::string join_rows(const std::vector<int>& rows) {
  std::string out;
  for (int row : rows) {
    if (!out.empty()) out += ',';
    out += std::to_string(row);
  }
  return out;
}

template <typename T>
void read_key(const pt::ptree& tree, const std::string& key, T& target) {
  try {
    if (auto value = tree.get_optional<T>(key)) target = *value;
  } catch (const pt::ptree_error& e) {
    throw DataError("config key '" + key + "': " + e.what());
  }
}

void read_agent(const pt::ptree& tree, const std::string& section, AgentSettings& agent) {
  read_key(tree, section + ".backend", agent.backend);
  read_key(tree, section + ".model", agent.model);
  read_key(tree, section + ".temperature", agent.temperature);
  read_key(tree, section + ".max_tokens", agent.max_tokens);
  std::int64_t seed = 0;
  if (tree.get_optional<std::string>(section + ".seed")) {
    read_key(tree, section + ".seed", seed);
    agent.seed = seed;
  }
}

// Keys "<prefix>_1", "<prefix>_2", ... in numeric order.
std::vector<std::string> read_numbered(const pt::ptree& tree, const std::string& section,
                                       const std::string& prefix) {
  std::vector<std::string> out;
  for (int i = 1;; ++i) {
    auto value = tree.get_optional<std::string>(section + "." + prefix + "_" + std::to_string(i));
    if (!value) break;
    out.push_back(*value);
  }
  return out;
}

std::string absolute_if_path(const std::string& value) {
  if (value.empty()) return value;
  return fs::absolute(value).lexically_normal().string();
}

std::string absolute_backend(const std::string& backend) {
  if (backend.rfind("mock:", 0) == 0) return "mock:" + absolute_if_path(backend.substr(5));
  return backend;
}

void write_agent(pt::ptree& tree, const std::string& section, const AgentSettings& agent) {
  tree.put(section + ".backend", absolute_backend(agent.backend));
  tree.put(section + ".model", agent.model);
  tree.put(section + ".temperature", agent.temperature);
  tree.put(section + ".max_tokens", agent.max_tokens);
  if (agent.seed) tree.put(section + ".seed", *agent.seed);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Flag values as parsed; unset optionals leave the file/default value alone.
struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> task, data, format, out;
  std::optional<std::size_t> sample_n, parallelism;
  std::optional<std::uint64_t> seed;
  bool no_cache = false;
  std::optional<std::string> target, target_model, defense, defense_model, attack, attack_model;
  std::optional<std::string> pipeline, strategy, fewshot_dir, guidance_rows;
  bool fewshot = false;
  bool en_exhaustive = false;
  std::vector<std::string> icl;
  std::optional<int> icl_rounds, iters;
  bool run_through_loops = false;
  // report
  std::string in;
  std::string report_format = "markdown";
  std::optional<std::string> report_out;
};

enum class Command { Classify, Attack, Defend, Evaluate, Arena, Report };

void add_common(CLI::App& cmd, Flags& f) {
  cmd.add_option("--config", f.config, "Run config file (key-value tables); flags override it");
  cmd.add_option("--task", f.task, "sst2 | rte | qqp | qnli | mnli-m | mnli-mm");
  cmd.add_option("--data", f.data, "Dataset file");
  cmd.add_option("--format", f.format, "tsv | jsonl");
  cmd.add_option("--sample-n", f.sample_n, "Evaluate a seeded sample of this many examples");
  cmd.add_option("--seed", f.seed, "Sampling seed");
  cmd.add_option("--out", f.out, "Output directory");
  cmd.add_option("--parallelism", f.parallelism, "Worker pool size and in-flight request bound");
  cmd.add_flag("--no-cache", f.no_cache, "Disable the on-disk response cache");
  cmd.add_option("--target", f.target, "Target LLM backend: mock:<script.json> | <base URL> | env");
  cmd.add_option("--target-model", f.target_model, "Target model name");
}

void add_attack_options(CLI::App& cmd, Flags& f) {
  cmd.add_option("--attack", f.attack, "Attack LLM backend");
  cmd.add_option("--attack-model", f.attack_model, "Attack model name");
  cmd.add_option("--strategy", f.strategy, "ensemble | single:<C1..S3>");
  cmd.add_flag("--fewshot", f.fewshot, "Use few-shot exemplars from --fewshot-dir");
  cmd.add_option("--fewshot-dir", f.fewshot_dir, "Directory holding <task>.jsonl exemplars");
  cmd.add_flag("--en-exhaustive", f.en_exhaustive, "Run all nine instructions even after a flip");
}

void add_defense_options(CLI::App& cmd, Flags& f) {
  cmd.add_option("--defense", f.defense, "Defense LLM backend");
  cmd.add_option("--defense-model", f.defense_model, "Defense model name");
  cmd.add_option("--icl", f.icl, "Specific guidance for in-context rounds (repeatable)");
  cmd.add_option("--icl-rounds", f.icl_rounds, "Maximum in-context rounds");
  cmd.add_option("--guidance-rows", f.guidance_rows, "Defense guidance rows, e.g. 1,3");
}

RunConfig resolve(const Flags& f, Command command) {
  RunConfig config = f.config ? load_config(*f.config) : RunConfig{};
  auto set = [](auto& target, const auto& value) {
    if (value) target = *value;
  };
  set(config.task, f.task);
  set(config.data, f.data);
  set(config.format, f.format);
  set(config.out, f.out);
  set(config.sample_n, f.sample_n);
  set(config.seed, f.seed);
  set(config.parallelism, f.parallelism);
  if (f.no_cache) config.cache = false;
  set(config.target.backend, f.target);
  set(config.target.model, f.target_model);
  set(config.defense.backend, f.defense);
  set(config.defense.model, f.defense_model);
  set(config.attack.backend, f.attack);
  set(config.attack.model, f.attack_model);
  set(config.pipeline, f.pipeline);
  set(config.strategy, f.strategy);
  set(config.fewshot_dir, f.fewshot_dir);
  if (f.fewshot) config.fewshot = true;
  if (f.en_exhaustive) config.en_exhaustive = true;
  if (!f.icl.empty()) config.icl = f.icl;
  set(config.icl_rounds, f.icl_rounds);
  if (f.guidance_rows) config.guidance_rows = parse_rows(*f.guidance_rows);
  set(config.arena_iters, f.iters);
  if (f.run_through_loops) config.run_through_loops = true;

  switch (command) {
    case Command::Classify:
      config.pipeline = "clean-only";
      break;
    case Command::Attack:
      config.pipeline = "attack";
      break;
    case Command::Defend:
      config.pipeline = "defend-only";
      break;
    case Command::Arena:
      config.pipeline = "arena";
      break;
    default:
      break;
  }
  if (config.task.empty()) throw UsageError("--task is required");
  if (config.data.empty()) throw UsageError("--data is required");
  if (config.target.backend.empty()) throw UsageError("--target is required");
  if (config.parallelism == 0) throw UsageError("--parallelism must be >= 1");
  return config;
}

Agents build_agents(const RunConfig& config, Pipeline pipeline) {
  const bool needs_attack = pipeline == Pipeline::Attack ||
                            pipeline == Pipeline::AttackThenDefend || pipeline == Pipeline::Arena;
  const bool needs_defense = pipeline == Pipeline::AttackThenDefend ||
                             pipeline == Pipeline::DefendOnly || pipeline == Pipeline::Arena;
  if (needs_attack && config.attack.backend.empty()) throw UsageError("--attack is required");
  if (needs_defense && config.defense.backend.empty()) throw UsageError("--defense is required");

  auto endpoint = [&](const AgentSettings& settings, const char* role) {
    AgentEndpoint out;
    std::optional<fs::path> cache_dir;
    if (config.cache) cache_dir = fs::path(config.out) / "cache" / role;
    out.backend = make_backend(settings, config.parallelism, cache_dir);
    out.model = settings.model;
    out.temperature = settings.temperature;
    out.max_tokens = settings.max_tokens;
    out.seed = settings.seed;
    return out;
  };
  Agents agents;
  agents.target = endpoint(config.target, "target");
  if (needs_defense) agents.defense = endpoint(config.defense, "defense");
  if (needs_attack) agents.attack = endpoint(config.attack, "attack");
  return agents;
}

ExperimentConfig experiment_config(const RunConfig& config, const TaskSpec& spec,
                                   Pipeline pipeline) {
  ExperimentConfig out;
  out.pipeline = pipeline;
  out.parallelism = config.parallelism;
  if (config.strategy.rfind("single:", 0) == 0) {
    try {
      out.attack.single = parse_perturbation(config.strategy.substr(7));
    } catch (const ContractError& e) {
      throw UsageError(e.what());
    }
  } else if (config.strategy != "ensemble") {
    throw UsageError("--strategy must be 'ensemble' or 'single:<id>'");
  }
  if (config.fewshot) out.attack.fewshot = load_fewshot(fewshot_path(config.fewshot_dir, spec.id));
  out.attack.exhaustive = config.en_exhaustive;

  out.defense.guidance.clear();
  for (int row : config.guidance_rows) {
    out.defense.guidance.push_back(default_defense_guidance().at(static_cast<std::size_t>(row - 1)));
  }
  for (const auto& extra : config.guidance_extra) out.defense.guidance.push_back(extra);
  if (out.defense.guidance.empty()) throw UsageError("defense guidance must not be empty");
  out.defense.icl_guidance = config.icl;
  out.defense.icl_max_rounds = config.icl_rounds;
  if (config.icl_rounds < 0) throw UsageError("--icl-rounds must be >= 0");
  out.arena_iters = config.arena_iters;
  out.run_through_loops = config.run_through_loops;
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
}

int execute(Command command, const Flags& flags, std::ostream& out) {
  if (command == Command::Report) {
    const RunReport report = read_report(flags.in);
    std::string rendered;
    if (flags.report_format == "markdown") {
      rendered = render_markdown(report);
    } else if (flags.report_format == "json") {
      rendered = report_to_json(report).dump(2) + "\n";
    } else {
      throw UsageError("--format must be markdown or json");
    }
    if (flags.report_out) {
      write_text(*flags.report_out, rendered);
    } else {
      out << rendered;
    }
    return kExitOk;
  }

  const RunConfig config = resolve(flags, command);
  Pipeline pipeline;
  TaskSpec spec;
  DataFormat format;
  try {
    pipeline = parse_pipeline(config.pipeline);
    spec = builtin_task(parse_task_id(config.task));
    format = parse_data_format(config.format);
  } catch (const ContractError& e) {
    throw UsageError(e.what());
  }
  Dataset dataset = load_dataset(config.data, spec, format);
  if (config.sample_n > 0) dataset = sample(dataset, config.sample_n, config.seed);

  const ExperimentConfig experiment = experiment_config(config, spec, pipeline);
  const Agents agents = build_agents(config, pipeline);
  const fs::path out_dir = config.out;
  fs::create_directories(out_dir);

  RunReport report;
  if (pipeline == Pipeline::Arena) {
    ArenaConfig arena;
    arena.max_iters = config.arena_iters;
    arena.defense = experiment.defense;
    arena.run_through_loops = config.run_through_loops;
    arena.parallelism = config.parallelism;
    if (arena.max_iters < 1) throw UsageError("--iters must be >= 1");
    const ArenaResult result = run_arena(dataset, arena, agents);
    std::ofstream traces(out_dir / "traces.jsonl", std::ios::binary | std::ios::trunc);
    write_traces(result.traces, traces);
    report = arena_report(dataset, arena, agents, result);
  } else {
    report = run_experiment(dataset, experiment, agents);
  }

  save_config(config, out_dir / "resolved-config.ini", report.config_digest);
  write_report(report, out_dir / "report.json");
  write_text(out_dir / "report.md", render_markdown(report));
  out << render_markdown(report);
  if (report.n > 0 && report.excluded == report.n) {
    log::error("every example failed; see per_example errors in report.json");
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace

RunConfig load_config(const fs::path& path) {
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ptree_error& e) {
    throw DataError("cannot read config '" + path.string() + "': " + e.what());
  }
  RunConfig config;
  read_key(tree, "run.task", config.task);
  read_key(tree, "run.data", config.data);
  read_key(tree, "run.format", config.format);
  read_key(tree, "run.sample_n", config.sample_n);
  read_key(tree, "run.seed", config.seed);
  read_key(tree, "run.out", config.out);
  read_key(tree, "run.parallelism", config.parallelism);
  read_key(tree, "run.cache", config.cache);
  read_key(tree, "run.pipeline", config.pipeline);
  read_agent(tree, "target", config.target);
  read_agent(tree, "defense", config.defense);
  read_agent(tree, "attack", config.attack);
  read_key(tree, "attack.strategy", config.strategy);
  read_key(tree, "attack.fewshot", config.fewshot);
  read_key(tree, "attack.fewshot_dir", config.fewshot_dir);
  read_key(tree, "attack.en_exhaustive", config.en_exhaustive);
  if (auto rows = tree.get_optional<std::string>("defense.guidance_rows")) {
    config.guidance_rows = parse_rows(*rows);
  }
  config.guidance_extra = read_numbered(tree, "defense", "guidance");
  config.icl = read_numbered(tree, "defense", "icl");
  read_key(tree, "defense.icl_rounds", config.icl_rounds);
  read_key(tree, "arena.iters", config.arena_iters);
  read_key(tree, "arena.run_through_loops", config.run_through_loops);
  return config;
}

void save_config(const RunConfig& config, const fs::path& path, const std::string& config_digest) {
  pt::ptree tree;
  tree.put("meta.tool_version", std::string(kToolVersion));
  tree.put("meta.config_digest", config_digest);
  tree.put("run.task", config.task);
  tree.put("run.data", absolute_if_path(config.data));
  tree.put("run.format", config.format);
  tree.put("run.sample_n", config.sample_n);
  tree.put("run.seed", config.seed);
  tree.put("run.out", absolute_if_path(config.out));
  tree.put("run.parallelism", config.parallelism);
  tree.put("run.cache", config.cache);
  tree.put("run.pipeline", config.pipeline);
  write_agent(tree, "target", config.target);
  if (!config.defense.backend.empty()) write_agent(tree, "defense", config.defense);
  if (!config.attack.backend.empty()) write_agent(tree, "attack", config.attack);
  tree.put("attack.strategy", config.strategy);
  tree.put("attack.fewshot", config.fewshot);
  tree.put("attack.fewshot_dir", absolute_if_path(config.fewshot_dir));
  tree.put("attack.en_exhaustive", config.en_exhaustive);
  tree.put("defense.guidance_rows", join_rows(config.guidance_rows));
  for (std::size_t i = 0; i < config.guidance_extra.size(); ++i) {
    tree.put("defense.guidance_" + std::to_string(i + 1), config.guidance_extra[i]);
  }
  for (std::size_t i = 0; i < config.icl.size(); ++i) {
    tree.put("defense.icl_" + std::to_string(i + 1), config.icl[i]);
  }
  tree.put("defense.icl_rounds", config.icl_rounds);
  tree.put("arena.iters", config.arena_iters);
  tree.put("arena.run_through_loops", config.run_through_loops);
  try {
    pt::write_ini(path.string(), tree);
  } catch (const pt::ptree_error& e) {
    throw DataError("cannot write config '" + path.string() + "': " + e.what());
  }
}

std::shared_ptr<ChatBackend> make_backend(const AgentSettings& settings, std::size_t parallelism,
                                          const std::optional<fs::path>& cache_dir) {
  std::shared_ptr<ChatBackend> backend;
  const std::string& spec = settings.backend;
  if (spec.rfind("mock:", 0) == 0) {
    const fs::path script_path = spec.substr(5);
    const std::string content = read_file(script_path);
    const auto doc = nlohmann::json::parse(content, nullptr, false);
    if (doc.is_discarded()) throw DataError("mock script '" + script_path.string() + "' is not JSON");
    backend = std::make_shared<MockBackend>(MockScript::from_json(doc),
                                            "mock:" + sha256_hex(content).substr(0, 16));
  } else if (spec == "env") {
    backend = std::make_shared<HttpBackend>(HttpBackendConfig::from_env());
  } else if (spec.rfind("http://", 0) == 0 || spec.rfind("https://", 0) == 0) {
    backend = std::make_shared<HttpBackend>(HttpBackendConfig::from_env(spec));
  } else {
    throw UsageError("backend '" + spec + "' must be mock:<file>, env, or an http(s) URL");
  }
  backend = std::make_shared<ThrottledBackend>(std::move(backend), parallelism);
  if (cache_dir) {
    backend = std::make_shared<CachedBackend>(std::make_shared<DiskCache>(*cache_dir), backend);
  }
  return backend;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"sentinel: LLM adversarial purification harness", "sentinel"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  Flags flags;

  auto* classify_cmd = app.add_subcommand("classify", "Classify clean examples");
  add_common(*classify_cmd, flags);

  auto* attack_cmd = app.add_subcommand("attack", "Attack examples and report ASR / RA");
  add_common(*attack_cmd, flags);
  add_attack_options(*attack_cmd, flags);

  auto* defend_cmd = app.add_subcommand("defend", "Purify examples and classify the result");
  add_common(*defend_cmd, flags);
  add_defense_options(*defend_cmd, flags);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Run a full evaluation pipeline");
  add_common(*evaluate_cmd, flags);
  add_attack_options(*evaluate_cmd, flags);
  add_defense_options(*evaluate_cmd, flags);
  evaluate_cmd->add_option("--pipeline", flags.pipeline,
                           "clean-only | attack | attack-then-defend | defend-only");

  auto* arena_cmd = app.add_subcommand("arena", "Alternate defense and attack agents");
  add_common(*arena_cmd, flags);
  add_attack_options(*arena_cmd, flags);
  add_defense_options(*arena_cmd, flags);
  arena_cmd->add_option("--iters", flags.iters, "Maximum iterations");
  arena_cmd->add_flag("--run-through-loops", flags.run_through_loops,
                      "Keep iterating after a repeated round");

  auto* report_cmd = app.add_subcommand("report", "Render a saved report.json");
  report_cmd->add_option("--in", flags.in, "report.json to render")->required();
  report_cmd->add_option("--format", flags.report_format, "markdown | json");
  report_cmd->add_option("--out", flags.report_out, "Write to this file instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  Command command = Command::Report;
  CLI::App* active = report_cmd;
  if (classify_cmd->parsed()) command = Command::Classify, active = classify_cmd;
  if (attack_cmd->parsed()) command = Command::Attack, active = attack_cmd;
  if (defend_cmd->parsed()) command = Command::Defend, active = defend_cmd;
  if (evaluate_cmd->parsed()) command = Command::Evaluate, active = evaluate_cmd;
  if (arena_cmd->parsed()) command = Command::Arena, active = arena_cmd;

  try {
    return execute(command, flags, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << active->help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace sentinel::cli
