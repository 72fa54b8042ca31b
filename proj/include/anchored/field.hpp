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

#ifndef ANCHORED_FIELD_HPP
#define ANCHORED_FIELD_HPP

#include <vector>

#include "anchored/linalg.hpp"
#include "anchored/mvn.hpp"
#include "anchored/rng.hpp"

namespace anchored {

/// Ordered 1-D model grid.
class Grid1D {
 public:
  Grid1D(VectorXd locations, double domain_length);

  /// `count` nodes at start, start + spacing, ...; domain length count * spacing.
  static Grid1D uniform(Index count, double start, double spacing);

  Index size() const { return locations_.size(); }
  const VectorXd& locations() const { return locations_; }
  double domain_length() const { return domain_length_; }

  /// Node index at a model coordinate; throws if no node sits there.
  Index index_of(double location) const;

 private:
  VectorXd locations_;
  double domain_length_;
};

/// Trend coefficients, variance and exponential-correlation range.
struct StructuralParams {
  VectorXd beta;
  double eta2 = 1.0;
  double lambda = 1.0;
};

enum class AnchorKind { measured, inverted };

/**
 * Linear functionals H of the field that act as parameters. Rows are ordered
 * measured (type-A) first, then inverted. Rows must be nonzero and linearly
 * independent so that H Q H' is invertible.
 */
class AnchorSet {
 public:
  AnchorSet() = default;
  AnchorSet(MatrixXd functionals, Index measured_count);

  /// Unit-selector rows at grid nodes.
  static AnchorSet points(const Grid1D& grid, const std::vector<double>& measured_locations,
                          const std::vector<double>& inverted_locations);

  Index size() const { return functionals_.rows(); }
  Index measured_count() const { return measured_count_; }
  Index inverted_count() const { return size() - measured_count_; }
  AnchorKind kind(Index row) const { return row < measured_count_ ? AnchorKind::measured : AnchorKind::inverted; }

  const MatrixXd& functionals() const { return functionals_; }
  MatrixXd measured() const { return functionals_.topRows(measured_count_); }
  MatrixXd inverted() const { return functionals_.bottomRows(inverted_count()); }

 private:
  MatrixXd functionals_;
  Index measured_count_ = 0;
};

/// Structural parameters plus the values of every anchor (measured rows first).
struct ModelParams {
  StructuralParams structural;
  VectorXd anchor_values;
};

double exp_correlation(double x1, double x2, double lambda);

/// Correlation between every location in `a` and every location in `b`.
MatrixXd correlation_matrix(const VectorXd& a, const VectorXd& b, double lambda);

/// Single column of ones: a globally constant mean.
MatrixXd constant_design(Index rows);

/// N(X beta, eta2 R) over the grid nodes.
MvnDistd prior_field_dist(const Grid1D& grid, const MatrixXd& design, const StructuralParams& structural);

/// Field distribution given H y = values.
MvnDistd anchored_field_dist(const Grid1D& grid, const MatrixXd& design, const StructuralParams& structural,
                             const MatrixXd& functionals, const VectorXd& values);

inline MvnDistd anchored_field_dist(const Grid1D& grid, const MatrixXd& design,
                                    const StructuralParams& structural, const AnchorSet& anchors,
                                    const VectorXd& values) {
  return anchored_field_dist(grid, design, structural, anchors.functionals(), values);
}

/**
 * One draw from the anchored field distribution. An unconditional field is
 * drawn from the prior and corrected by the kriging update, so the anchors
 * are honoured to round-off on every draw.
 */
VectorXd simulate_field(const Grid1D& grid, const MatrixXd& design, const StructuralParams& structural,
                        const MatrixXd& functionals, const VectorXd& values, Rng& rng);

inline VectorXd simulate_field(const Grid1D& grid, const MatrixXd& design, const StructuralParams& structural,
                               const AnchorSet& anchors, const VectorXd& values, Rng& rng) {
  return simulate_field(grid, design, structural, anchors.functionals(), values, rng);
}

/// Distribution of query_functionals * y given known_functionals * y = known_values.
MvnDistd anchor_conditional_dist(const StructuralParams& structural, const Grid1D& grid, const MatrixXd& design,
                                 const MatrixXd& known_functionals, const VectorXd& known_values,
                                 const MatrixXd& query_functionals);

}  // namespace anchored

#endif  // ANCHORED_FIELD_HPP
