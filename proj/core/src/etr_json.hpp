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

#ifndef TREEDOX_SRC_ETR_JSON_HPP_
#define TREEDOX_SRC_ETR_JSON_HPP_

#include "json.hpp"
#include "treedox/etr.hpp"

namespace treedox::etr {

nlohmann::json config_to_json(const EtrConfig& config);
EtrConfig config_from_json(const nlohmann::json& j);

}  // namespace treedox::etr

#endif  // TREEDOX_SRC_ETR_JSON_HPP_
