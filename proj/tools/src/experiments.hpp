// Copyright 2026 The TreeDOX Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// End-to-end benchmark experiments. Each one writes a bundle directory:
// config.json (fully resolved), results.json and plot-ready CSV files.
// Bundle contents depend only on the config, never on timing or threads.

#ifndef TREEDOX_TOOLS_EXPERIMENTS_HPP_
#define TREEDOX_TOOLS_EXPERIMENTS_HPP_

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace treedox::cli {

using nlohmann::json;

// A paper-scale run that would not fit the machine.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunContext {
  std::size_t threads = 1;
  std::ostream* log = nullptr;  // progress and timings; may be null
};

std::vector<std::string> benchmark_names();

// Full parameter preset for a benchmark at "desk" or "paper" scale.
// Throws std::invalid_argument for unknown names or scales.
json benchmark_preset(const std::string& name, const std::string& scale);

// Runs `name` with a resolved config (a preset with overrides applied) and
// writes the bundle into out_dir. Returns the results document.
json run_benchmark(const std::string& name, const json& config,
                   const std::filesystem::path& out_dir, const RunContext& ctx);

// Estimated peak bytes for a two-stage fit on n samples with n_features
// stage-1 columns, n_outputs label columns and the given tree counts.
double estimate_fit_bytes(std::size_t n, std::size_t n_features,
                          std::size_t n_outputs, std::size_t stage1_trees,
                          std::size_t stage2_trees);

// MemAvailable from /proc/meminfo in bytes, or 0 when unknown.
double available_memory_bytes();

}  // namespace treedox::cli

#endif  // TREEDOX_TOOLS_EXPERIMENTS_HPP_
