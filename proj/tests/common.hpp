// Copyright 2026 The Anchored Inversion Authors
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

#ifndef ANCHORED_TESTS_COMMON_HPP
#define ANCHORED_TESTS_COMMON_HPP

#include <filesystem>
#include <string>

#include <json.hpp>

#include "anchored/config.hpp"

namespace testing_support {

inline std::filesystem::path source_dir() { return ANCHORED_SOURCE_DIR; }

inline anchored::ScenarioConfig reference_config() {
  return anchored::load_config(source_dir() / "configs" / "transect.json");
}

// Small scenario on 30 nodes: 3 type-A points, 4 inverted anchors, one process with 5 outputs.
inline nlohmann::json small_json() {
  return nlohmann::json::parse(R"({
    "grid": {"count": 30, "start": 1, "spacing": 1},
    "field_transform": {"kind": "log"},
    "prior": {"lambda_lower": 1.5, "lambda_upper": 30},
    "typeA_locations": [3, 15, 27],
    "anchor_locations": [6, 10, 20, 24],
    "data": {
      "typeA": {"locations": [3, 15, 27], "values": [0.2, -0.4, 0.5]},
      "typeB": {"indices": [0, 1, 2, 3, 4], "values": [0.83, 0.66, 0.5, 0.33, 0.17]}
    },
    "forward": {"processes": [{"left": 1, "right": 0, "observations": [5, 10, 15, 20, 25]}]},
    "scenario": "AB",
    "sample_size": 400,
    "neighbors": 60,
    "seed": 42,
    "workers": 1,
    "posterior_draws": 50
  })");
}

inline anchored::ScenarioConfig small_config() { return anchored::parse_config(small_json(), source_dir()); }

}  // namespace testing_support

#endif  // ANCHORED_TESTS_COMMON_HPP
