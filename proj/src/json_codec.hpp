// Copyright 2026 The grvae Authors
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

#include "grvae/config.hpp"
#include "json.hpp"

namespace grvae {

using Json = nlohmann::ordered_json;

Json config_json(const ExperimentConfig& config);
// Throws ConfigError naming the offending key.
ExperimentConfig config_from_json(const Json& doc, Task fallback_task);

}  // namespace grvae
