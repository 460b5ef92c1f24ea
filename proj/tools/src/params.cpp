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

#include "params.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

#include "treedox/errors.hpp"
#include "treedox/ingest.hpp"

namespace treedox::cli {

namespace {

std::string flag_name(const std::string& key) {
  std::string s = "--" + key;
  for (char& c : s) {
    if (c == '_') c = '-';
  }
  return s;
}

long long parse_integer(const std::string& key, std::string_view text) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument(key + ": expected an integer, got '" + std::string(text) + "'");
  }
  return v;
}

json check_like(const json& like, const std::string& key, const json& v) {
  if (like.is_boolean()) {
    if (!v.is_boolean()) throw std::invalid_argument(key + ": expected true/false");
    return v;
  }
  if (like.is_number_unsigned()) {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw std::invalid_argument(key + ": expected a non-negative integer");
    }
    return v.get<unsigned long long>();
  }
  if (like.is_number_integer()) {
    if (!v.is_number_integer()) throw std::invalid_argument(key + ": expected an integer");
    return v;
  }
  if (like.is_number()) {
    if (!v.is_number()) throw std::invalid_argument(key + ": expected a number");
    return v.get<double>();
  }
  if (like.is_string()) {
    if (!v.is_string()) throw std::invalid_argument(key + ": expected a string");
    return v;
  }
  if (like.is_array()) {
    if (!v.is_array()) throw std::invalid_argument(key + ": expected a list");
    for (const auto& e : v) {
      if (!e.is_number_integer()) throw std::invalid_argument(key + ": expected integers");
    }
    return v;
  }
  return v;
}

}  // namespace

json parse_like(const json& like, const std::string& key, const std::string& text) {
  if (like.is_boolean()) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw std::invalid_argument(key + ": expected true/false");
  }
  if (like.is_number_unsigned()) {
    const auto v = parse_integer(key, text);
    if (v < 0) throw std::invalid_argument(key + ": must be non-negative");
    return static_cast<unsigned long long>(v);
  }
  if (like.is_number_integer()) return parse_integer(key, text);
  if (like.is_number()) {
    try {
      return ingest::parse_double(text);
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument(key + ": expected a number, got '" + text + "'");
    }
  }
  if (like.is_array()) {
    json arr = json::array();
    std::string_view rest = text;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      arr.push_back(parse_integer(key, rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return arr;
  }
  return text;
}

void ParamSet::add(const std::string& key, json default_value, const std::string& help) {
  defaults_[key] = default_value;
  if (default_value.is_boolean()) {
    flags_[key] = false;
    options_[key] = app_->add_flag(flag_name(key), flags_[key], help);
  } else {
    raw_[key];
    options_[key] = app_->add_option(flag_name(key), raw_[key], help);
  }
}

void ParamSet::set_default(const std::string& key, json value) {
  if (!defaults_.contains(key)) throw std::logic_error("unknown parameter " + key);
  defaults_[key] = check_like(defaults_[key], key, value);
}

bool ParamSet::given(const std::string& key) const {
  const auto it = options_.find(key);
  return it != options_.end() && it->second->count() > 0;
}

json ParamSet::resolve(const json& config) const {
  json out = defaults_;
  if (!config.is_object()) throw std::invalid_argument("config: expected a JSON object");
  for (const auto& [key, value] : config.items()) {
    if (!defaults_.contains(key)) {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    out[key] = check_like(defaults_[key], key, value);
  }
  for (const auto& [key, opt] : options_) {
    if (opt->count() == 0) continue;
    if (defaults_[key].is_boolean()) {
      out[key] = flags_.at(key);
    } else {
      out[key] = parse_like(defaults_[key], key, raw_.at(key));
    }
  }
  return out;
}

json load_config(const std::filesystem::path& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

}  // namespace treedox::cli
