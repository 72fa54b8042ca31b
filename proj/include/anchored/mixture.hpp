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

#ifndef ANCHORED_MIXTURE_HPP
#define ANCHORED_MIXTURE_HPP

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "anchored/linalg.hpp"
#include "anchored/rng.hpp"

namespace anchored {

/**
 * Weighted draws of xi = (parameters, forward outputs). Row i of `points`
 * is xi_i; the first `split` columns are the parameter block.
 */
struct WeightedJointSample {
  MatrixXd points;
  VectorXd weights;
  Index split = 0;

  static WeightedJointSample uniform(MatrixXd points, Index split);

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }
  void validate() const;
};

struct MixtureComponent {
  double weight = 0.0;
  VectorXd mean;
  MatrixXd cov;
};

/// sum_i weight_i N(mean_i, cov_i).
struct NormalMixture {
  Index dim = 0;
  std::vector<MixtureComponent> components;

  Index size() const { return static_cast<Index>(components.size()); }
  VectorXd weights() const;
  void validate() const;
};

/// Conditioning left no component with positive weight.
class EmptyPosteriorError : public std::runtime_error {
 public:
  EmptyPosteriorError(const std::string& what, Index nearest, double distance)
      : std::runtime_error(what), nearest_component(nearest), mahalanobis_distance(distance) {}
  Index nearest_component;
  double mahalanobis_distance;
};

/// Weighted covariance sum w (x - m)(x - m)' / (1 - sum w^2) of the given rows, weights renormalized.
MatrixXd weighted_covariance(const MatrixXd& points, const VectorXd& weights, std::span<const Index> rows);

/// Weighted covariance of all rows.
MatrixXd weighted_covariance(const MatrixXd& points, const VectorXd& weights);

/**
 * Rows forming the kernel neighbourhood of point i: i itself plus its k
 * nearest other points in the Mahalanobis metric of the global weighted
 * covariance. Ties are broken by row index. Sorted ascending.
 */
std::vector<Index> mahalanobis_neighbourhood(const WeightedJointSample& sample, Index i, Index k);

/// Weighted covariance of the neighbourhood of point i, centred on the neighbourhood mean.
MatrixXd local_covariance(const WeightedJointSample& sample, Index i, Index k);

/**
 * Kernel density estimate sum_i w_i N(xi_i, h Sigma_i) with Sigma_i the local
 * covariance over k Mahalanobis neighbours. A single-point sample yields one
 * degenerate component.
 */
NormalMixture build_kde(const WeightedJointSample& sample, Index k, double bandwidth, int workers = 0);

/**
 * Conditions a joint mixture on its trailing coordinates equal to `observed`.
 * Returns the mixture over the leading `split` coordinates with weights
 * proportional to w_i N(observed; mean2_i, cov22_i). Components whose
 * weight underflows to zero are dropped.
 */
NormalMixture condition(const NormalMixture& joint, Index split, const VectorXd& observed, int workers = 0);

/// One draw: component by weight, then a Gaussian draw.
VectorXd mixture_draw(const NormalMixture& mix, Rng& rng);

/// `count` draws, one per row.
MatrixXd mixture_sample(const NormalMixture& mix, Index count, Rng& rng);

/// Mixture density of the coordinates `coords`, evaluated at each row of `points`.
VectorXd mixture_marginal_density(const NormalMixture& mix, std::span<const Index> coords, const MatrixXd& points);

VectorXd mixture_mean(const NormalMixture& mix);
MatrixXd mixture_covariance(const NormalMixture& mix);

/// 1 / sum w^2 for normalized weights.
double effective_sample_size(const VectorXd& weights);

/**
 * Text serialization: a header `anchored-mixture 1`, a line `dim D components N`,
 * then per component one line `weight mean_1 .. mean_D` followed by D
 * covariance rows.
 */
void write_mixture(std::ostream& out, const NormalMixture& mix);
NormalMixture read_mixture(std::istream& in);

}  // namespace anchored

#endif  // ANCHORED_MIXTURE_HPP
