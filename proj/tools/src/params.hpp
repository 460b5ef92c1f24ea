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

// Command parameters that can come from flags or a JSON config file.
// Resolution order: built-in default, then config file, then explicit flag.

#ifndef TREEDOX_TOOLS_PARAMS_HPP_
#define TREEDOX_TOOLS_PARAMS_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace treedox::cli {

using nlohmann::json;

class ParamSet {
 public:
  explicit ParamSet(CLI::App* app) : app_(app) {}
  ParamSet(const ParamSet&) = delete;
  ParamSet& operator=(const ParamSet&) = delete;

  // Registers --key (underscores become dashes). The default's JSON type
  // fixes the parameter type: bool (a flag), integer, number, string, or an
  // array of integers written as "1,3,6".
  void add(const std::string& key, json default_value, const std::string& help);

  // Overwrites a default before resolution (e.g. per-benchmark presets).
  void set_default(const std::string& key, json value);
  [[nodiscard]] bool has(const std::string& key) const { return defaults_.contains(key); }
  [[nodiscard]] bool given(const std::string& key) const;

  // Throws std::invalid_argument on unknown config keys or ill-typed values.
  [[nodiscard]] json resolve(const json& config) const;

 private:
  CLI::App* app_;
  json defaults_ = json::object();
  std::map<std::string, std::string> raw_;
  std::map<std::string, bool> flags_;
  std::map<std::string, CLI::Option*> options_;
};

// Parses a value given as text into the type of `like`.
json parse_like(const json& like, const std::string& key, const std::string& text);

// Reads a JSON object from `path`; an empty path yields {}.
json load_config(const std::filesystem::path& path);

}  // namespace treedox::cli

#endif  // TREEDOX_TOOLS_PARAMS_HPP_
