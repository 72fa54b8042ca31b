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

#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "anchored/engine.hpp"
#include "common.hpp"

using namespace anchored;
using testing_support::reference_config;
using testing_support::small_config;

TEST_CASE("parameter layout") {
  const ScenarioConfig c = small_config();
  const ParameterLayout layout = make_layout(c);
  CHECK(layout.size() == 2 + 1 + 4);
  CHECK(layout.measured == 0);
  CHECK(layout.measured_total == 3);
  CHECK(layout.index_of("lambda") == 0);
  CHECK(layout.index_of("beta0") == 2);
  CHECK(layout.index_of("anchor3") == 6);
  CHECK_THROWS(layout.index_of("anchor4"));
  CHECK(layout.names().back() == "anchor3");

  ScenarioConfig noisy = c;
  noisy.type_a->error = ErrorDist::diagonal_normal(VectorXd::Constant(3, 0.1));
  const ParameterLayout nl = make_layout(noisy);
  CHECK(nl.measured == 3);
  CHECK(nl.index_of("measured1") == 4);
}

TEST_CASE("transformed parameter round trip") {
  const ScenarioConfig c = small_config();
  const ParameterLayout layout = make_layout(c);
  ModelParams p;
  p.structural.beta = VectorXd::Constant(1, -0.3);
  p.structural.eta2 = 0.8;
  p.structural.lambda = 7.5;
  p.anchor_values = VectorXd::LinSpaced(7, -1.0, 1.0);
  p.anchor_values.head(3) = c.type_a->values;
  const VectorXd u = to_transformed(p, layout, c.transforms);
  CHECK(u(0) == doctest::Approx(std::log((7.5 - 1.5) / (30.0 - 7.5))));
  CHECK(u(1) == doctest::Approx(std::log(0.8)));
  const ModelParams back = from_transformed(u, layout, c.transforms, c.type_a->values);
  CHECK(back.structural.lambda == doctest::Approx(7.5).epsilon(1e-12));
  CHECK(back.structural.eta2 == doctest::Approx(0.8).epsilon(1e-12));
  CHECK((back.anchor_values - p.anchor_values).norm() < 1e-12);
}

TEST_CASE("error-free type-A data are carried by every draw") {
  const ScenarioConfig c = small_config();
  const WeightedParams w = sample_theta_given_typeA(c);
  REQUIRE(w.params.size() == 400);
  CHECK(w.weights.sum() == doctest::Approx(1.0));
  CHECK(w.weights.maxCoeff() == w.weights.minCoeff());
  for (const auto& p : w.params) {
    CHECK(p.anchor_values.head(3) == c.type_a->values);
    CHECK(p.anchor_values.size() == 7);
    CHECK(p.structural.lambda > 1.5);
    CHECK(p.structural.lambda < 30.0);
  }
}

TEST_CASE("no inverted anchors leaves only structure and type-A anchors") {
  ScenarioConfig c = small_config();
  c.anchor_locations.clear();
  const WeightedParams w = sample_theta_given_typeA(c);
  CHECK(w.params.front().anchor_values.size() == 3);
  CHECK(make_layout(c).size() == 3);
}

TEST_CASE("anchors next to a type-A point are less spread than distant ones") {
  ScenarioConfig c = small_config();
  c.anchor_locations = {4.0, 9.0};  // 1 and 6 nodes from the type-A point at 3
  c.sample_size = 4000;
  const WeightedParams w = sample_theta_given_typeA(c);
  // Medians: with three data points the variance posterior has no finite mean.
  std::vector<double> near_dev, far_dev;
  for (const auto& p : w.params) {
    near_dev.push_back(std::abs(p.anchor_values(3) - c.type_a->values(0)));
    far_dev.push_back(std::abs(p.anchor_values(4) - c.type_a->values(0)));
  }
  CHECK(quantile(near_dev, 0.5) < quantile(far_dev, 0.5));
}

TEST_CASE("scenario A skips the forward model") {
  ScenarioConfig c = small_config();
  c.kind = ScenarioKind::a_only;
  const RunArtifacts art = run_inversion(c);
  CHECK(art.forward_evaluations == 0);
  CHECK(art.posterior.size() == 400);
  CHECK(art.joint.size() == 0);
  for (const auto& comp : art.posterior.components) CHECK(comp.cov.isZero(0.0));
  CHECK(art.lambda_grid.size() == 200);
}

TEST_CASE("AB run evaluates the forward model once per draw") {
  const ScenarioConfig c = small_config();
  const auto forward = make_forward(c);
  CountingForward counting(*forward);
  const RunArtifacts art = run_inversion(c, counting);
  CHECK(counting.count() == 400);
  CHECK(art.forward_evaluations == 400);
  CHECK(art.discarded == 0);
  CHECK(art.neighbors_used == 60);
  CHECK(art.joint.dim() == make_layout(c).size() + 5);
  CHECK(art.posterior.dim == make_layout(c).size());
  CHECK(art.ess > 0.0);
  CHECK(art.ess <= 400.0 + 1e-9);

  const PosteriorRealizations r = draw_posterior_fields(c, art.posterior, 25, counting);
  CHECK(counting.count() == 425);
  CHECK(r.forward_evaluations == 25);
  CHECK(r.fields.rows() == 25);
  CHECK(r.reproductions.cols() == 5);

  const PosteriorRealizations none = draw_posterior_fields(c, art.posterior, 0, counting);
  CHECK(none.fields.rows() == 0);
  CHECK(counting.count() == 425);
}

TEST_CASE("posterior fields honour their anchors") {
  const ScenarioConfig c = small_config();
  const RunArtifacts art = run_inversion(c);
  const auto forward = make_forward(c);
  const PosteriorRealizations r = draw_posterior_fields(c, art.posterior, 200, *forward);
  const MatrixXd h = make_anchor_set(c).functionals();
  for (Index i = 0; i < r.fields.rows(); ++i) {
    const VectorXd err = h * r.fields.row(i).transpose() - r.parameters[static_cast<std::size_t>(i)].anchor_values;
    CHECK(err.cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("same seed gives the same posterior") {
  const ScenarioConfig c = small_config();
  ScenarioConfig c4 = c;
  c4.workers = 3;
  const RunArtifacts a = run_inversion(c);
  const RunArtifacts b = run_inversion(c4);
  REQUIRE(a.posterior.size() == b.posterior.size());
  for (Index i = 0; i < a.posterior.size(); ++i) {
    CHECK(a.posterior.components[static_cast<std::size_t>(i)].weight ==
          b.posterior.components[static_cast<std::size_t>(i)].weight);
    CHECK(a.posterior.components[static_cast<std::size_t>(i)].mean ==
          b.posterior.components[static_cast<std::size_t>(i)].mean);
  }
}

namespace {

// Fails on fields whose first node exceeds a threshold; deterministic in the field.
class FlakyForward final : public ForwardModel {
 public:
  FlakyForward(const ForwardModel& inner, double threshold) : inner_(inner), threshold_(threshold) {}
  VectorXd run(const VectorXd& natural) const override {
    if (natural(0) > threshold_) throw std::runtime_error("solver diverged");
    return inner_.run(natural);
  }
  Index output_size() const override { return inner_.output_size(); }

 private:
  const ForwardModel& inner_;
  double threshold_;
};

}  // namespace

TEST_CASE("failed forward runs are discarded up to the tolerance") {
  ScenarioConfig c = small_config();
  c.anchor_locations = {1.0, 10.0, 20.0, 24.0};  // node 0 is an inverted anchor
  const auto forward = make_forward(c);
  const WeightedParams w = sample_theta_given_typeA(c);
  std::vector<double> first;
  for (const auto& p : w.params) first.push_back(std::exp(p.anchor_values(3)));
  std::sort(first.begin(), first.end());

  // Thresholds sit between draws: fields match their anchors only to round-off.
  const auto between = [&](std::size_t from_top) { return 0.5 * (first[first.size() - from_top] + first[first.size() - from_top - 1]); };
  const FlakyForward few(*forward, between(20));  // 5 % fail
  const RunArtifacts art = run_inversion(c, few);
  CHECK(art.discarded == 20);
  CHECK(static_cast<Index>(art.parameter_sample.size()) == 380);

  const FlakyForward many(*forward, between(60));  // 15 % fail
  CHECK_THROWS_AS(run_inversion(c, many), std::runtime_error);
}

TEST_CASE("quantiles and reproduction statistics") {
  CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.5) == 2.5);
  CHECK(quantile({1.0, 2.0, 3.0, 4.0, 5.0}, 0.05) == doctest::Approx(1.2));
  CHECK(quantile({7.0}, 0.95) == 7.0);

  VectorXd z(3);
  z << 1.0, -2.0, 5.0;
  MatrixXd same(10, 3);
  for (Index r = 0; r < 10; ++r) same.row(r) = z.transpose();
  for (const auto& row : reproduction_stats(same, z)) {
    CHECK(row.covered);
    CHECK(row.quantiles[0] == row.observed);
    CHECK(row.quantiles[4] == row.observed);
    CHECK(row.median_abs_deviation == 0.0);
  }

  Rng rng = substream(1, StreamTag::posterior, 0);
  const MatrixXd draws = MatrixXd::NullaryExpr(500, 3, [&]() { return standard_normal<double>(1, rng)(0); });
  const auto rows = reproduction_stats(draws, z);
  for (const auto& row : rows) {
    for (std::size_t q = 1; q < 5; ++q) CHECK(row.quantiles[q] >= row.quantiles[q - 1]);
  }
  CHECK(rows[0].covered);
  CHECK_FALSE(rows[2].covered);
}

TEST_CASE("forward failures in posterior draws become missing rows") {
  VectorXd z(2);
  z << 0.0, 1.0;
  MatrixXd draws(3, 2);
  draws << 0.0, 1.0, NAN, NAN, 0.5, 2.0;
  const auto rows = reproduction_stats(draws, z);
  CHECK(rows[0].quantiles[4] == doctest::Approx(0.475));
}

TEST_CASE("reference run: AB reproduces type-B data better than A") {
  ScenarioConfig ab = reference_config();
  ab.sample_size = 2000;
  ab.neighbors = 200;
  ScenarioConfig a = ab;
  a.kind = ScenarioKind::a_only;
  const auto forward = make_forward(ab);
  const RunArtifacts run_ab = run_inversion(ab, *forward);
  const RunArtifacts run_a = run_inversion(a, *forward);
  const auto rep_ab = draw_posterior_fields(ab, run_ab.posterior, 300, *forward);
  const auto rep_a = draw_posterior_fields(a, run_a.posterior, 300, *forward);
  const auto s_ab = reproduction_stats(rep_ab.reproductions, ab.type_b->values);
  const auto s_a = reproduction_stats(rep_a.reproductions, ab.type_b->values);
  int better = 0;
  for (std::size_t j = 0; j < s_ab.size(); ++j) better += s_ab[j].median_abs_deviation <= s_a[j].median_abs_deviation;
  CHECK(better > static_cast<int>(s_ab.size()) / 2);
}
