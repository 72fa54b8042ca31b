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

#include "anchored/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "anchored/data.hpp"
#include "anchored/mvn.hpp"
#include "anchored/parallel.hpp"
#include "anchored/prior.hpp"

namespace anchored {

std::vector<std::string> ParameterLayout::names() const {
  std::vector<std::string> out{"lambda", "eta2"};
  for (Index j = 0; j < trend_dim; ++j) out.push_back(fmt::format("beta{}", j));
  for (Index j = 0; j < measured; ++j) out.push_back(fmt::format("measured{}", j));
  for (Index j = 0; j < inverted; ++j) out.push_back(fmt::format("anchor{}", j));
  return out;
}

Index ParameterLayout::index_of(const std::string& name) const {
  const auto all = names();
  const auto it = std::find(all.begin(), all.end(), name);
  if (it == all.end()) throw std::invalid_argument("unknown parameter '" + name + "'");
  return static_cast<Index>(it - all.begin());
}

namespace {

bool measured_is_random(const ScenarioConfig& c) {
  return c.kind != ScenarioKind::b_only && c.type_a && !c.type_a->error.is_degenerate();
}

VectorXd fixed_measured_values(const ScenarioConfig& c) {
  if (c.kind == ScenarioKind::b_only || !c.type_a) return {};
  return c.type_a->values;
}

VectorXd select(const VectorXd& v, const std::vector<Index>& indices) {
  VectorXd out(static_cast<Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const Index idx = indices[i];
    if (idx >= v.size()) throw std::out_of_range(fmt::format("type-B index {} beyond forward output size {}", idx, v.size()));
    out(static_cast<Index>(i)) = v(idx);
  }
  return out;
}

std::vector<Index> output_indices(const ScenarioConfig& c, Index output_size) {
  if (c.type_b) return c.type_b->indices;
  std::vector<Index> all(static_cast<std::size_t>(output_size));
  for (Index i = 0; i < output_size; ++i) all[static_cast<std::size_t>(i)] = i;
  return all;
}

StructuralParams draw_bounded(const BoundedStructuralPrior& b, const StructuralPrior& prior, Index trend_dim, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  StructuralParams s;
  s.lambda = prior.lambda_lower + (prior.lambda_upper - prior.lambda_lower) * unit(rng);
  s.eta2 = std::exp(std::log(b.eta2_lower) + (std::log(b.eta2_upper) - std::log(b.eta2_lower)) * unit(rng));
  s.beta.resize(trend_dim);
  for (Index j = 0; j < trend_dim; ++j) s.beta(j) = b.beta_lower + (b.beta_upper - b.beta_lower) * unit(rng);
  return s;
}

}  // namespace

ParameterLayout make_layout(const ScenarioConfig& config) {
  ParameterLayout layout;
  layout.trend_dim = 1;
  layout.measured_total = (config.kind == ScenarioKind::b_only || !config.type_a) ? 0 : config.type_a->size();
  layout.measured = measured_is_random(config) ? layout.measured_total : 0;
  layout.inverted = static_cast<Index>(config.anchor_locations.size());
  return layout;
}

AnchorSet make_anchor_set(const ScenarioConfig& config) {
  if (config.kind == ScenarioKind::b_only || !config.type_a) {
    return AnchorSet::points(config.grid, {}, config.anchor_locations);
  }
  return AnchorSet::points(config.grid, config.type_a->locations, config.anchor_locations);
}

VectorXd to_transformed(const ModelParams& params, const ParameterLayout& layout, const TransformSet& transforms) {
  require_dims(params.structural.beta.size() == layout.trend_dim, "trend coefficients vs layout");
  require_dims(params.anchor_values.size() == layout.measured_total + layout.inverted, "anchor values vs layout");
  VectorXd u(layout.size());
  u(layout.lambda_index()) = transforms.lambda.apply(params.structural.lambda);
  u(layout.eta2_index()) = transforms.eta2.apply(params.structural.eta2);
  u.segment(layout.beta_begin(), layout.trend_dim) = transforms.beta.apply(params.structural.beta);
  if (layout.measured > 0) {
    u.segment(layout.measured_begin(), layout.measured) = transforms.anchors.apply(params.anchor_values.head(layout.measured));
  }
  u.segment(layout.inverted_begin(), layout.inverted) = transforms.anchors.apply(params.anchor_values.tail(layout.inverted));
  return u;
}

ModelParams from_transformed(const VectorXd& u, const ParameterLayout& layout, const TransformSet& transforms,
                             const VectorXd& fixed_measured) {
  require_dims(u.size() == layout.size(), "parameter vector vs layout");
  ModelParams p;
  p.structural.lambda = transforms.lambda.invert(u(layout.lambda_index()));
  p.structural.eta2 = transforms.eta2.invert(u(layout.eta2_index()));
  p.structural.beta = transforms.beta.invert(u.segment(layout.beta_begin(), layout.trend_dim));
  p.anchor_values.resize(layout.measured_total + layout.inverted);
  if (layout.measured > 0) {
    p.anchor_values.head(layout.measured) = transforms.anchors.invert(u.segment(layout.measured_begin(), layout.measured));
  } else {
    require_dims(fixed_measured.size() == layout.measured_total, "fixed measured anchors vs layout");
    p.anchor_values.head(layout.measured_total) = fixed_measured;
  }
  p.anchor_values.tail(layout.inverted) = transforms.anchors.invert(u.segment(layout.inverted_begin(), layout.inverted));
  return p;
}

WeightedParams sample_theta_given_typeA(const ScenarioConfig& config) {
  config.validate();
  const AnchorSet anchors = make_anchor_set(config);
  const MatrixXd design = constant_design(config.grid.size());
  const MatrixXd measured = anchors.measured();
  const MatrixXd inverted = anchors.inverted();
  const Index n = config.sample_size;
  const bool b_only = config.kind == ScenarioKind::b_only;

  std::optional<StructuralPosterior> shared;
  std::vector<double> measured_locations;
  if (!b_only) {
    measured_locations = config.type_a->locations;
    if (!measured_is_random(config)) {
      shared.emplace(PointData::with_constant_mean(
                         Eigen::Map<const VectorXd>(measured_locations.data(), anchors.measured_count()),
                         config.type_a->values),
                     config.prior);
    }
  }

  WeightedParams out;
  out.params.resize(static_cast<std::size_t>(n));
  out.weights = VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  parallel_for(static_cast<std::size_t>(n), config.workers, [&](std::size_t i) {
    ModelParams& p = out.params[i];
    VectorXd measured_values;
    if (b_only) {
      Rng rng = substream(config.seed, StreamTag::structural, i);
      p.structural = draw_bounded(*config.bounded_prior, config.prior, design.cols(), rng);
    } else {
      Rng assign_rng = substream(config.seed, StreamTag::typeA_assignment, i);
      measured_values = assign_typeA_anchors(*config.type_a, assign_rng);
      Rng rng = substream(config.seed, StreamTag::structural, i);
      if (shared) {
        p.structural = shared->draw(rng);
      } else {
        const StructuralPosterior posterior(
            PointData::with_constant_mean(Eigen::Map<const VectorXd>(measured_locations.data(), measured_values.size()),
                                          measured_values),
            config.prior);
        p.structural = posterior.draw(rng);
      }
    }
    Rng anchor_rng = substream(config.seed, StreamTag::anchors, i);
    const MvnDistd inverted_dist =
        anchor_conditional_dist(p.structural, config.grid, design, measured, measured_values, inverted);
    const MatrixXd draw = sample(inverted_dist, 1, anchor_rng);
    p.anchor_values.resize(measured_values.size() + inverted.rows());
    p.anchor_values << measured_values, draw.row(0).transpose();
  });
  return out;
}

RunArtifacts run_inversion(const ScenarioConfig& config, const ForwardModel& forward) {
  config.validate();
  const CountingForward counter(forward);
  RunArtifacts art;
  art.layout = make_layout(config);

  if (config.kind != ScenarioKind::b_only) {
    const StructuralPosterior typeA_posterior(
        PointData::with_constant_mean(
            Eigen::Map<const VectorXd>(config.type_a->locations.data(), config.type_a->size()), config.type_a->values),
        config.prior);
    art.lambda_grid = typeA_posterior.lambda_grid();
    art.lambda_probabilities = typeA_posterior.probabilities();
  }

  WeightedParams theta = sample_theta_given_typeA(config);
  const auto n = static_cast<Index>(theta.params.size());
  const Index p = art.layout.size();

  if (config.kind == ScenarioKind::a_only) {
    art.parameter_sample = std::move(theta.params);
    art.posterior.dim = p;
    for (Index i = 0; i < n; ++i) {
      art.posterior.components.push_back(
          {theta.weights(i), to_transformed(art.parameter_sample[static_cast<std::size_t>(i)], art.layout, config.transforms),
           MatrixXd::Zero(p, p)});
    }
    art.ess = effective_sample_size(theta.weights);
    return art;
  }

  const AnchorSet anchors = make_anchor_set(config);
  const MatrixXd design = constant_design(config.grid.size());
  const TypeBData& type_b = *config.type_b;
  const Index q = type_b.size();
  for (Index idx : type_b.indices) art.output_names.push_back(fmt::format("out{}", idx));

  MatrixXd rows(n, p + q);
  MatrixXd raw_outputs(n, q);
  std::vector<char> ok(static_cast<std::size_t>(n), 0);
  parallel_for(static_cast<std::size_t>(n), config.workers, [&](std::size_t i) {
    const auto& params = theta.params[i];
    const auto r = static_cast<Index>(i);
    try {
      Rng field_rng = substream(config.seed, StreamTag::field, i);
      const VectorXd y = simulate_field(config.grid, design, params.structural, anchors, params.anchor_values, field_rng);
      const VectorXd m = select(counter.run(config.field_transform.invert(y)), type_b.indices);
      if (!m.allFinite()) return;
      Rng error_rng = substream(config.seed, StreamTag::output_error, i);
      const VectorXd perturbed = perturb_forward_output(m, type_b.error, error_rng);
      rows.row(r) << to_transformed(params, art.layout, config.transforms).transpose(),
          config.transforms.output.apply(perturbed).transpose();
      raw_outputs.row(r) = perturbed.transpose();
      ok[i] = 1;
    } catch (const std::out_of_range&) {
      throw;
    } catch (const std::exception&) {
      ok[i] = 0;
    }
  });

  std::vector<Index> kept;
  for (Index i = 0; i < n; ++i) {
    if (ok[static_cast<std::size_t>(i)]) kept.push_back(i);
  }
  art.discarded = n - static_cast<Index>(kept.size());
  if (static_cast<double>(art.discarded) > config.max_failure_fraction * static_cast<double>(n)) {
    throw std::runtime_error(fmt::format("{} of {} forward evaluations failed (limit {:.0f} %)", art.discarded, n,
                                         100.0 * config.max_failure_fraction));
  }
  if (art.discarded > 0) fmt::print(stderr, "warning: discarded {} draws with failed forward runs\n", art.discarded);

  MatrixXd points(static_cast<Index>(kept.size()), p + q);
  art.outputs.resize(static_cast<Index>(kept.size()), q);
  art.parameter_sample.reserve(kept.size());
  for (std::size_t r = 0; r < kept.size(); ++r) {
    points.row(static_cast<Index>(r)) = rows.row(kept[r]);
    art.outputs.row(static_cast<Index>(r)) = raw_outputs.row(kept[r]);
    art.parameter_sample.push_back(std::move(theta.params[static_cast<std::size_t>(kept[r])]));
  }
  art.joint = WeightedJointSample::uniform(std::move(points), p);
  art.neighbors_used = std::min(config.neighbors, art.joint.size() - 1);
  const NormalMixture kde = build_kde(art.joint, art.neighbors_used, config.bandwidth, config.workers);
  art.posterior = condition(kde, p, config.transforms.output.apply(type_b.values), config.workers);
  art.ess = effective_sample_size(art.posterior.weights());
  if (art.ess < config.ess_warning) {
    fmt::print(stderr, "warning: effective sample size {:.1f} is below {:.0f}; posterior weights are highly skewed\n",
               art.ess, config.ess_warning);
  }
  art.forward_evaluations = counter.count();
  return art;
}

RunArtifacts run_inversion(const ScenarioConfig& config) {
  const auto forward = make_forward(config);
  return run_inversion(config, *forward);
}

PosteriorRealizations draw_posterior_fields(const ScenarioConfig& config, const NormalMixture& posterior,
                                            Index count, const ForwardModel& forward) {
  const CountingForward counter(forward);
  const ParameterLayout layout = make_layout(config);
  require_dims(posterior.dim == layout.size(), "posterior mixture vs parameter layout");
  const AnchorSet anchors = make_anchor_set(config);
  const MatrixXd design = constant_design(config.grid.size());
  const VectorXd fixed = fixed_measured_values(config);
  const auto indices = output_indices(config, forward.output_size());

  PosteriorRealizations out;
  out.parameters.resize(static_cast<std::size_t>(count));
  out.fields.resize(count, config.grid.size());
  out.reproductions.resize(count, static_cast<Index>(indices.size()));
  if (count == 0) return out;
  std::vector<char> failed(static_cast<std::size_t>(count), 0);
  parallel_for(static_cast<std::size_t>(count), config.workers, [&](std::size_t j) {
    const auto r = static_cast<Index>(j);
    Rng rng = substream(config.seed, StreamTag::posterior, j);
    const VectorXd u = mixture_draw(posterior, rng);
    ModelParams& params = out.parameters[j];
    params = from_transformed(u, layout, config.transforms, fixed);
    const VectorXd y = simulate_field(config.grid, design, params.structural, anchors, params.anchor_values, rng);
    out.fields.row(r) = y.transpose();
    try {
      out.reproductions.row(r) = select(counter.run(config.field_transform.invert(y)), indices).transpose();
    } catch (const std::out_of_range&) {
      throw;
    } catch (const std::exception&) {
      out.reproductions.row(r).setConstant(std::numeric_limits<double>::quiet_NaN());
      failed[j] = 1;
    }
  });
  const auto failures = std::count(failed.begin(), failed.end(), 1);
  if (failures > 0) fmt::print(stderr, "warning: {} posterior realizations had failed forward runs\n", failures);
  out.forward_evaluations = counter.count();
  return out;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<QuantileRow> reproduction_stats(const MatrixXd& draws, const VectorXd& observed) {
  require_dims(draws.cols() == observed.size(), "reproductions vs observed data");
  if (draws.rows() == 0) throw std::invalid_argument("reproduction statistics need at least one draw");
  std::vector<QuantileRow> rows;
  for (Index c = 0; c < draws.cols(); ++c) {
    std::vector<double> col, dev;
    for (Index r = 0; r < draws.rows(); ++r) {
      if (std::isnan(draws(r, c))) continue;
      col.push_back(draws(r, c));
      dev.push_back(std::abs(draws(r, c) - observed(c)));
    }
    QuantileRow row;
    row.index = c;
    row.observed = observed(c);
    for (std::size_t k = 0; k < kReportQuantiles.size(); ++k) row.quantiles[k] = quantile(col, kReportQuantiles[k]);
    row.covered = row.quantiles.front() <= observed(c) && observed(c) <= row.quantiles.back();
    row.median_abs_deviation = quantile(dev, 0.5);
    rows.push_back(row);
  }
  return rows;
}

double median_anchor_error(const std::vector<ModelParams>& draws, Index measured_total, const VectorXd& truth) {
  std::vector<double> errors;
  for (const auto& d : draws) {
    const Index inverted = d.anchor_values.size() - measured_total;
    require_dims(inverted == truth.size(), "inverted anchors vs truth");
    for (Index j = 0; j < inverted; ++j) errors.push_back(std::abs(d.anchor_values(measured_total + j) - truth(j)));
  }
  return quantile(std::move(errors), 0.5);
}

}  // namespace anchored
