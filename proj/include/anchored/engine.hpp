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

#ifndef ANCHORED_ENGINE_HPP
#define ANCHORED_ENGINE_HPP

#include <array>
#include <string>
#include <vector>

#include "anchored/config.hpp"
#include "anchored/field.hpp"
#include "anchored/forward.hpp"
#include "anchored/mixture.hpp"

namespace anchored {

/**
 * Layout of the transformed parameter vector:
 * [lambda, eta2, beta..., measured anchors (only when type-A data carry
 * error), inverted anchors...].
 */
struct ParameterLayout {
  Index trend_dim = 1;
  Index measured = 0;       // measured anchors carried in the vector
  Index measured_total = 0; // measured anchors in the anchor set
  Index inverted = 0;

  Index lambda_index() const { return 0; }
  Index eta2_index() const { return 1; }
  Index beta_begin() const { return 2; }
  Index measured_begin() const { return 2 + trend_dim; }
  Index inverted_begin() const { return 2 + trend_dim + measured; }
  Index size() const { return 2 + trend_dim + measured + inverted; }

  std::vector<std::string> names() const;
  /// Coordinate index of a parameter name such as "lambda", "beta0" or "anchor3".
  Index index_of(const std::string& name) const;
};

ParameterLayout make_layout(const ScenarioConfig& config);

/// Anchor functionals: type-A rows (unless scenario B), then the inverted anchors.
AnchorSet make_anchor_set(const ScenarioConfig& config);

VectorXd to_transformed(const ModelParams& params, const ParameterLayout& layout, const TransformSet& transforms);

/// Inverse of to_transformed; measured anchors absent from the vector take `fixed_measured`.
ModelParams from_transformed(const VectorXd& u, const ParameterLayout& layout, const TransformSet& transforms,
                             const VectorXd& fixed_measured);

/// Parameter draws given type-A data, with weights (uniform here).
struct WeightedParams {
  std::vector<ModelParams> params;
  VectorXd weights;
};

/**
 * n draws of Theta | z_a: measured anchors assigned from the type-A data,
 * structural parameters from the hierarchical posterior given those anchors,
 * inverted anchors from their conditional normal. Scenario B draws the
 * structural parameters from the bounded prior instead.
 */
WeightedParams sample_theta_given_typeA(const ScenarioConfig& config);

struct RunArtifacts {
  ParameterLayout layout;
  std::vector<std::string> output_names;
  std::vector<ModelParams> parameter_sample;  // draws kept after forward failures
  MatrixXd outputs;                           // selected (perturbed) forward outputs per kept draw
  WeightedJointSample joint;                  // empty for scenario A
  NormalMixture posterior;                    // over the transformed parameter vector
  VectorXd lambda_grid;                       // structural posterior given type-A data
  VectorXd lambda_probabilities;
  double ess = 0.0;
  Index discarded = 0;
  Index neighbors_used = 0;
  unsigned long long forward_evaluations = 0;
};

RunArtifacts run_inversion(const ScenarioConfig& config, const ForwardModel& forward);
RunArtifacts run_inversion(const ScenarioConfig& config);

struct PosteriorRealizations {
  std::vector<ModelParams> parameters;
  MatrixXd fields;        // model unit, one realization per row
  MatrixXd reproductions; // forward outputs at the type-B indices
  unsigned long long forward_evaluations = 0;
};

/// Draws Theta from the posterior mixture, simulates one field per draw and runs the forward model on it.
PosteriorRealizations draw_posterior_fields(const ScenarioConfig& config, const NormalMixture& posterior,
                                            Index count, const ForwardModel& forward);

struct QuantileRow {
  Index index = 0;
  double observed = 0.0;
  std::array<double, 5> quantiles{};  // 5, 25, 50, 75, 95 %
  bool covered = false;               // observed within [5 %, 95 %]
  double median_abs_deviation = 0.0;  // median |draw - observed|
};

inline constexpr std::array<double, 5> kReportQuantiles{0.05, 0.25, 0.5, 0.75, 0.95};

/// Linear-interpolation sample quantile.
double quantile(std::vector<double> values, double p);

/// Per column of `draws`: quantiles, coverage of `observed` and median absolute deviation from it.
std::vector<QuantileRow> reproduction_stats(const MatrixXd& draws, const VectorXd& observed);

/// Median over all (draw, anchor) pairs of |drawn inverted anchor - true value|.
double median_anchor_error(const std::vector<ModelParams>& draws, Index measured_total, const VectorXd& truth);

}  // namespace anchored

#endif  // ANCHORED_ENGINE_HPP
