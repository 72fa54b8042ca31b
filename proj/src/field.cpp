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

#include "anchored/field.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace anchored {

Grid1D::Grid1D(VectorXd locations, double domain_length)
    : locations_(std::move(locations)), domain_length_(domain_length) {
  if (locations_.size() < 2) throw std::invalid_argument("grid needs at least two nodes");
  for (Index i = 1; i < locations_.size(); ++i) {
    if (!(locations_(i) > locations_(i - 1))) {
      throw std::invalid_argument("grid locations must be strictly increasing");
    }
  }
  if (!(domain_length_ > 0.0)) throw std::invalid_argument("domain length must be positive");
}

Grid1D Grid1D::uniform(Index count, double start, double spacing) {
  if (!(spacing > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  VectorXd loc(count);
  for (Index i = 0; i < count; ++i) loc(i) = start + spacing * static_cast<double>(i);
  return {std::move(loc), spacing * static_cast<double>(count)};
}

Index Grid1D::index_of(double location) const {
  const double tol = 1e-9 * std::max(1.0, std::abs(location));
  for (Index i = 0; i < locations_.size(); ++i) {
    if (std::abs(locations_(i) - location) <= tol) return i;
  }
  throw std::invalid_argument(fmt::format("location {} is not a grid node", location));
}

AnchorSet::AnchorSet(MatrixXd functionals, Index measured_count)
    : functionals_(std::move(functionals)), measured_count_(measured_count) {
  if (measured_count_ < 0 || measured_count_ > functionals_.rows()) {
    throw std::invalid_argument("measured anchor count out of range");
  }
  for (Index r = 0; r < functionals_.rows(); ++r) {
    if (functionals_.row(r).isZero(0.0)) throw std::invalid_argument(fmt::format("anchor row {} is zero", r));
  }
  if (functionals_.rows() > 0) {
    Eigen::ColPivHouseholderQR<MatrixXd> qr(functionals_.transpose());
    if (qr.rank() < functionals_.rows()) {
      throw std::invalid_argument("anchor functionals are duplicated or linearly dependent");
    }
  }
}

AnchorSet AnchorSet::points(const Grid1D& grid, const std::vector<double>& measured_locations,
                            const std::vector<double>& inverted_locations) {
  const auto m = static_cast<Index>(measured_locations.size() + inverted_locations.size());
  MatrixXd h = MatrixXd::Zero(m, grid.size());
  Index row = 0;
  for (double x : measured_locations) h(row++, grid.index_of(x)) = 1.0;
  for (double x : inverted_locations) h(row++, grid.index_of(x)) = 1.0;
  return {std::move(h), static_cast<Index>(measured_locations.size())};
}

double exp_correlation(double x1, double x2, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("correlation range must be positive");
  return std::exp(-std::abs(x1 - x2) / lambda);
}

MatrixXd correlation_matrix(const VectorXd& a, const VectorXd& b, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("correlation range must be positive");
  MatrixXd r(a.size(), b.size());
  for (Index j = 0; j < b.size(); ++j) {
    for (Index i = 0; i < a.size(); ++i) r(i, j) = std::exp(-std::abs(a(i) - b(j)) / lambda);
  }
  return r;
}

MatrixXd constant_design(Index rows) { return MatrixXd::Ones(rows, 1); }

MvnDistd prior_field_dist(const Grid1D& grid, const MatrixXd& design, const StructuralParams& structural) {
  require_dims(design.rows() == grid.size(), "design rows vs grid size");
  require_dims(design.cols() == structural.beta.size(), "design columns vs trend coefficients");
  if (!(structural.eta2 > 0.0)) throw std::invalid_argument("variance must be positive");
  const auto& x = grid.locations();
  return {design * structural.beta, structural.eta2 * correlation_matrix(x, x, structural.lambda)};
}

MvnDistd anchored_field_dist(const Grid1D& grid, const MatrixXd& design, const StructuralParams& structural,
                             const MatrixXd& functionals, const VectorXd& values) {
  return condition_on_linear(prior_field_dist(grid, design, structural), functionals, values);
}

VectorXd simulate_field(const Grid1D& grid, const MatrixXd& design, const StructuralParams& structural,
                        const MatrixXd& functionals, const VectorXd& values, Rng& rng) {
  require_dims(functionals.cols() == grid.size(), "anchor functionals vs grid size");
  require_dims(values.size() == functionals.rows(), "anchor values vs functionals");
  const MvnDistd prior = prior_field_dist(grid, design, structural);
  const Cholesky<double> prior_chol(prior.cov, "field covariance");
  VectorXd y = prior.mean + prior_chol.matrixL() * standard_normal(grid.size(), rng);
  if (functionals.rows() == 0) return y;

  const MatrixXd cross = prior.cov * functionals.transpose();
  const Cholesky<double> gram(symmetrized(functionals * cross), "anchor covariance");
  y += cross * gram.solve(values - functionals * y);
  return y;
}

MvnDistd anchor_conditional_dist(const StructuralParams& structural, const Grid1D& grid, const MatrixXd& design,
                                 const MatrixXd& known_functionals, const VectorXd& known_values,
                                 const MatrixXd& query_functionals) {
  require_dims(query_functionals.cols() == grid.size(), "query functionals vs grid size");
  const Index a = known_functionals.rows();
  const Index b = query_functionals.rows();
  MatrixXd stacked(b + a, grid.size());
  stacked << query_functionals, known_functionals;
  const MvnDistd joint = linear_image(prior_field_dist(grid, design, structural), stacked);
  return condition_partitioned(joint, b, known_values);
}

}  // namespace anchored
