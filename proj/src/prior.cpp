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

#include "anchored/prior.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

namespace anchored {

void StructuralPrior::validate() const {
  if (!(lambda_lower > 0.0) || !(lambda_lower < lambda_upper) || !std::isfinite(lambda_upper)) {
    throw std::invalid_argument("lambda support must satisfy 0 < lower < upper < inf");
  }
  if (lambda_grid_size < 2) throw std::invalid_argument("lambda grid needs at least two points");
}

VectorXd StructuralPrior::lambda_grid() const {
  validate();
  const double step = (lambda_upper - lambda_lower) / lambda_grid_size;
  VectorXd grid(lambda_grid_size);
  for (int k = 0; k < lambda_grid_size; ++k) grid(k) = lambda_lower + (k + 0.5) * step;
  return grid;
}

void PointData::validate() const {
  require_dims(locations.size() == values.size(), "point locations vs values");
  require_dims(design.rows() == values.size(), "design rows vs point values");
  if (!values.allFinite()) throw std::invalid_argument("point values must be finite");
}

PointData PointData::with_constant_mean(VectorXd locations, VectorXd values) {
  const Index n = values.size();
  return {std::move(locations), std::move(values), constant_design(n)};
}

double variance_dof(const PointData& data, const StructuralPrior& prior) {
  return static_cast<double>(data.size()) + 2.0 * prior.a - static_cast<double>(data.trend_dim()) - 2.0;
}

LambdaStatistics LambdaStatistics::compute(double lambda, const PointData& data) {
  const MatrixXd r = correlation_matrix(data.locations, data.locations, lambda);
  const Cholesky<double> r_chol(r, "data correlation matrix");
  const MatrixXd w = r_chol.whiten(data.design);  // L^{-1} X*
  const VectorXd v = r_chol.whiten(data.values);  // L^{-1} y*
  const MatrixXd q = symmetrized(w.transpose() * w);
  const Cholesky<double> q_chol(q, "trend information matrix");
  const VectorXd b = w.transpose() * v;

  LambdaStatistics s;
  s.lambda = lambda;
  s.log_det_r = r_chol.log_determinant();
  s.log_det_q = q_chol.log_determinant();
  s.gls = q_chol.solve(b);
  s.s2 = v.squaredNorm() - q_chol.whiten(b).squaredNorm();
  s.q_lower = q_chol.matrixL();
  if (!(s.s2 > 0.0)) {
    throw std::runtime_error(fmt::format("residual sum of squares is not positive at lambda = {}", lambda));
  }
  return s;
}

namespace {

void require_positive_dof(double nu) {
  if (!(nu > 0.0)) {
    throw std::invalid_argument(fmt::format(
        "variance posterior degrees of freedom n + 2a - d_beta - 2 = {} must be positive", nu));
  }
}

double log_density_from(const LambdaStatistics& s, double nu, const StructuralPrior& prior) {
  return -std::log(prior.lambda_upper - prior.lambda_lower) - 0.5 * s.log_det_r - 0.5 * s.log_det_q -
         0.5 * nu * std::log(s.s2);
}

double draw_inv_chi2(double nu, double s2, Rng& rng) {
  std::chi_squared_distribution<double> chi2(nu);
  double x = 0.0;
  while (!(x > 0.0)) x = chi2(rng);
  return s2 / x;  // nu * (s2 / nu) / chi2_nu
}

VectorXd draw_trend_from(const LambdaStatistics& s, double eta2, Rng& rng) {
  if (!(eta2 >= 0.0)) throw std::invalid_argument("variance must be nonnegative");
  VectorXd z = standard_normal(s.gls.size(), rng);
  s.q_lower.transpose().triangularView<Eigen::Upper>().solveInPlace(z);  // L_q^{-T} z ~ N(0, Q^{-1})
  return s.gls + std::sqrt(eta2) * z;
}

}  // namespace

double lambda_posterior_logdensity(double lambda, const PointData& data, const StructuralPrior& prior) {
  prior.validate();
  data.validate();
  if (!prior.in_support(lambda)) return -std::numeric_limits<double>::infinity();
  const double nu = variance_dof(data, prior);
  require_positive_dof(nu);
  return log_density_from(LambdaStatistics::compute(lambda, data), nu, prior);
}

StructuralPosterior::StructuralPosterior(PointData data, StructuralPrior prior)
    : data_(std::move(data)), prior_(prior), dof_(variance_dof(data_, prior_)) {
  prior_.validate();
  data_.validate();
  require_positive_dof(dof_);
  lambda_grid_ = prior_.lambda_grid();
  const Index m = lambda_grid_.size();
  log_weights_.resize(m);
  stats_.reserve(static_cast<std::size_t>(m));
  for (Index k = 0; k < m; ++k) {
    stats_.push_back(LambdaStatistics::compute(lambda_grid_(k), data_));
    log_weights_(k) = log_density_from(stats_.back(), dof_, prior_);
  }
  log_weights_.array() -= log_weights_.maxCoeff();
  probabilities_ = log_weights_.array().exp();
  probabilities_ /= probabilities_.sum();
}

Index StructuralPosterior::draw_lambda_index(Rng& rng) const {
  std::discrete_distribution<Index> pick(probabilities_.data(), probabilities_.data() + probabilities_.size());
  return pick(rng);
}

double StructuralPosterior::draw_variance(Index k, Rng& rng) const {
  return draw_inv_chi2(dof_, statistics(k).s2, rng);
}

VectorXd StructuralPosterior::draw_trend(Index k, double eta2, Rng& rng) const {
  return draw_trend_from(statistics(k), eta2, rng);
}

StructuralParams StructuralPosterior::draw(Rng& rng) const {
  const Index k = draw_lambda_index(rng);
  StructuralParams p;
  p.lambda = lambda_grid_(k);
  p.eta2 = draw_variance(k, rng);
  p.beta = draw_trend(k, p.eta2, rng);
  return p;
}

std::vector<StructuralParams> StructuralPosterior::sample(Index count, Rng& rng) const {
  std::vector<StructuralParams> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) out.push_back(draw(rng));
  return out;
}

double sample_variance_given_lambda(double lambda, const PointData& data, const StructuralPrior& prior, Rng& rng) {
  data.validate();
  const double nu = variance_dof(data, prior);
  require_positive_dof(nu);
  return draw_inv_chi2(nu, LambdaStatistics::compute(lambda, data).s2, rng);
}

VectorXd sample_trend_given_variance(double lambda, double eta2, const PointData& data, Rng& rng) {
  data.validate();
  return draw_trend_from(LambdaStatistics::compute(lambda, data), eta2, rng);
}

std::vector<StructuralParams> sample_structural(const PointData& data, const StructuralPrior& prior, Index count,
                                                Rng& rng) {
  return StructuralPosterior(data, prior).sample(count, rng);
}

}  // namespace anchored
