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

#ifndef ANCHORED_PRIOR_HPP
#define ANCHORED_PRIOR_HPP

#include <vector>

#include "anchored/field.hpp"
#include "anchored/linalg.hpp"
#include "anchored/rng.hpp"

namespace anchored {

/**
 * p(beta, eta2 | lambda) proportional to 1 / (eta2)^a, with lambda uniform on
 * (lambda_lower, lambda_upper). The lambda posterior is tabulated on
 * `lambda_grid_size` cell midpoints of the support.
 */
struct StructuralPrior {
  double a = 1.0;
  double lambda_lower = 0.0;
  double lambda_upper = 1.0;
  int lambda_grid_size = 200;

  void validate() const;
  bool in_support(double lambda) const { return lambda > lambda_lower && lambda < lambda_upper; }
  VectorXd lambda_grid() const;
};

/// Point values y* observed at x*, with their design matrix X*.
struct PointData {
  VectorXd locations;
  VectorXd values;
  MatrixXd design;

  Index size() const { return values.size(); }
  Index trend_dim() const { return design.cols(); }
  void validate() const;

  /// Constant-mean design.
  static PointData with_constant_mean(VectorXd locations, VectorXd values);
};

/// Degrees of freedom n + 2a - d_beta - 2 of the variance posterior.
double variance_dof(const PointData& data, const StructuralPrior& prior);

/// Sufficient statistics of the point data at one lambda.
struct LambdaStatistics {
  double lambda = 0.0;
  double log_det_r = 0.0;    // log |R*|
  double log_det_q = 0.0;    // log |Q|, Q = X*' R*^{-1} X*
  double s2 = 0.0;           // residual quadratic form
  VectorXd gls;              // Q^{-1} X*' R*^{-1} y*
  MatrixXd q_lower;          // Cholesky factor of Q

  static LambdaStatistics compute(double lambda, const PointData& data);
};

/// Unnormalized log p(lambda | y*); -inf outside the prior support.
double lambda_posterior_logdensity(double lambda, const PointData& data, const StructuralPrior& prior);

/**
 * Hierarchical posterior of (beta, eta2, lambda) given point data, with lambda
 * discretized: lambda from the tabulated weights, eta2 | lambda from a scaled
 * inverse-chi-square, beta | eta2, lambda from a normal.
 */
class StructuralPosterior {
 public:
  StructuralPosterior(PointData data, StructuralPrior prior);

  const PointData& data() const { return data_; }
  const StructuralPrior& prior() const { return prior_; }
  double dof() const { return dof_; }

  const VectorXd& lambda_grid() const { return lambda_grid_; }
  /// Log weights shifted so the largest is zero.
  const VectorXd& log_weights() const { return log_weights_; }
  /// Normalized probabilities over the lambda grid.
  const VectorXd& probabilities() const { return probabilities_; }
  const LambdaStatistics& statistics(Index k) const { return stats_[static_cast<std::size_t>(k)]; }

  Index draw_lambda_index(Rng& rng) const;
  double draw_variance(Index k, Rng& rng) const;
  VectorXd draw_trend(Index k, double eta2, Rng& rng) const;
  StructuralParams draw(Rng& rng) const;
  std::vector<StructuralParams> sample(Index count, Rng& rng) const;

 private:
  PointData data_;
  StructuralPrior prior_;
  double dof_;
  VectorXd lambda_grid_;
  VectorXd log_weights_;
  VectorXd probabilities_;
  std::vector<LambdaStatistics> stats_;
};

/// eta2 draw from Inv-chi2(nu, S^2 / nu) at the given lambda.
double sample_variance_given_lambda(double lambda, const PointData& data, const StructuralPrior& prior, Rng& rng);

/// beta draw from N(Q^{-1} X*' R*^{-1} y*, eta2 Q^{-1}).
VectorXd sample_trend_given_variance(double lambda, double eta2, const PointData& data, Rng& rng);

std::vector<StructuralParams> sample_structural(const PointData& data, const StructuralPrior& prior, Index count,
                                                Rng& rng);

}  // namespace anchored

#endif  // ANCHORED_PRIOR_HPP
