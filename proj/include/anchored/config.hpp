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

#ifndef ANCHORED_CONFIG_HPP
#define ANCHORED_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "anchored/data.hpp"
#include "anchored/field.hpp"
#include "anchored/forward.hpp"
#include "anchored/prior.hpp"
#include "anchored/transform.hpp"

namespace anchored {

enum class ScenarioKind { a_only, ab, b_only };

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string& name);

/// Transforms taking each parameter group onto the real line.
struct TransformSet {
  Transform<double> lambda = Transform<double>::logit(0.0, 1.0);
  Transform<double> eta2 = Transform<double>::log();
  Transform<double> beta = Transform<double>::identity();
  Transform<double> anchors = Transform<double>::identity();
  Transform<double> output = Transform<double>::identity();
};

/**
 * Proper structural prior used when no type-A data exist: lambda uniform on
 * the prior support, eta2 log-uniform (the 1/eta2 prior truncated) and each
 * trend coefficient uniform.
 */
struct BoundedStructuralPrior {
  double beta_lower = -1.0;
  double beta_upper = 1.0;
  double eta2_lower = 0.01;
  double eta2_upper = 10.0;

  void validate() const;
};

struct ExternalForwardSettings {
  std::string command;
  Index output_size = 0;
};

struct TruthSettings {
  std::filesystem::path profile;
  double typeA_sd = 0.0;
  double typeB_sd = 0.0;
};

struct ScenarioConfig {
  Grid1D grid = Grid1D::uniform(2, 0.0, 1.0);
  Transform<double> field_transform = Transform<double>::identity();
  StructuralPrior prior;

  std::vector<double> typeA_locations;
  std::vector<double> anchor_locations;
  std::optional<TypeAData> type_a;
  std::optional<TypeBData> type_b;

  std::optional<ForwardSpec> diffusion;
  std::optional<ExternalForwardSettings> external;

  TransformSet transforms;
  ScenarioKind kind = ScenarioKind::ab;
  Index sample_size = 5000;
  Index neighbors = 500;
  double bandwidth = 1.0;
  std::uint64_t seed = 1;
  int workers = 0;
  Index posterior_draws = 1000;
  double max_failure_fraction = 0.1;
  double ess_warning = 50.0;
  std::optional<BoundedStructuralPrior> bounded_prior;
  TruthSettings truth;

  void validate() const;
};

/// Parses a configuration; relative paths resolve against `base_dir`.
ScenarioConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Self-contained JSON (data inlined) that parses back to an equivalent config.
nlohmann::json to_json(const ScenarioConfig& config);

std::unique_ptr<ForwardModel> make_forward(const ScenarioConfig& config);

}  // namespace anchored

#endif  // ANCHORED_CONFIG_HPP
