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
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sentinel/llm_gateway.hpp"

namespace sentinel::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

struct AgentSettings {
  // "mock:<script.json>", an http(s) base URL, or "env" for SENTINEL_BASE_URL.
  std::string backend;
  std::string model = "gpt-3.5-turbo-0613";
  double temperature = 0.0;
  int max_tokens = 256;
  std::optional<std::int64_t> seed;
};

struct RunConfig {
  std::string task;
  std::string data;
  std::string format = "tsv";
  std::size_t sample_n = 0;  // 0: whole dataset
  std::uint64_t seed = 0;
  std::string out = "run";
  std::size_t parallelism = 4;
  bool cache = true;

  AgentSettings target;
  AgentSettings defense;
  AgentSettings attack;

  std::string pipeline = "attack-then-defend";
  std::string strategy = "ensemble";  // or "single:<C1..S3>"
  bool fewshot = false;
  std::string fewshot_dir = "fewshot";
  bool en_exhaustive = false;

  std::vector<int> guidance_rows{1, 2, 3, 4, 5, 6};
  std::vector<std::string> guidance_extra;
  std::vector<std::string> icl;
  int icl_rounds = 1;

  int arena_iters = 5;
  bool run_through_loops = false;
};

// Key-value tables ([run], [target], [defense], [attack], [arena]). Throws
// DataError on unreadable files or bad values.
RunConfig load_config(const std::filesystem::path& path);
void save_config(const RunConfig& config, const std::filesystem::path& path,
                 const std::string& config_digest);

// Backend stack for one agent: scripted mock or HTTP, behind the in-flight
// bound and, when cache_dir is set, a disk cache.
std::shared_ptr<ChatBackend> make_backend(const AgentSettings& settings, std::size_t parallelism,
                                          const std::optional<std::filesystem::path>& cache_dir);

// Entry point shared by the binary and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sentinel::cli
