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

#ifndef ANCHORED_MVN_HPP
#define ANCHORED_MVN_HPP

#include <numbers>
#include <utility>

#include "anchored/linalg.hpp"
#include "anchored/rng.hpp"

namespace anchored {

/// Multivariate normal N(mean, cov).
template <typename Scalar>
struct MvnDist {
  Vector<Scalar> mean;
  Matrix<Scalar> cov;

  MvnDist() = default;
  MvnDist(Vector<Scalar> m, Matrix<Scalar> c) : mean(std::move(m)), cov(std::move(c)) {
    require_dims(cov.rows() == mean.size() && cov.cols() == mean.size(), "covariance vs mean");
    if (!is_symmetric(cov)) throw std::invalid_argument("covariance is not symmetric");
  }

  Index dim() const { return mean.size(); }
};

using MvnDistd = MvnDist<double>;

/// Distribution of H X for X ~ dist.
template <typename Scalar, typename Derived>
MvnDist<Scalar> linear_image(const MvnDist<Scalar>& dist, const Eigen::MatrixBase<Derived>& h) {
  require_dims(h.cols() == dist.dim(), "linear functional columns vs distribution dimension");
  Matrix<Scalar> hs = h * dist.cov;
  return {h * dist.mean, symmetrized(hs * h.transpose())};
}

/**
 * Distribution of X given H X = obs:
 *   N(mu + S H' (H S H')^{-1} (obs - H mu), S - S H' (H S H')^{-1} H S).
 * Solves go through a Cholesky factor of H S H'.
 */
template <typename Scalar, typename DerivedH, typename DerivedObs>
MvnDist<Scalar> condition_on_linear(const MvnDist<Scalar>& dist, const Eigen::MatrixBase<DerivedH>& h,
                                    const Eigen::MatrixBase<DerivedObs>& obs) {
  require_dims(h.cols() == dist.dim(), "linear functional columns vs distribution dimension");
  require_dims(obs.size() == h.rows(), "observation length vs functional rows");
  if (h.rows() == 0) return dist;

  const Matrix<Scalar> cross = dist.cov * h.transpose();  // S H'
  const Matrix<Scalar> gram = symmetrized(h * cross);     // H S H'
  const Cholesky<Scalar> chol(gram, "conditioning covariance");
  const Vector<Scalar> residual = obs - h * dist.mean;
  const Matrix<Scalar> whitened = chol.whiten(cross.transpose());  // L^{-1} H S

  Vector<Scalar> mean = dist.mean + cross * chol.solve(residual);
  Matrix<Scalar> cov = dist.cov;
  cov.noalias() -= whitened.transpose() * whitened;
  return {std::move(mean), symmetrized(cov)};
}

/**
 * Conditional of the leading `split` coordinates given the trailing block
 * equals obs (partitioned-covariance form).
 */
template <typename Scalar, typename DerivedObs>
MvnDist<Scalar> condition_partitioned(const MvnDist<Scalar>& joint, Index split,
                                      const Eigen::MatrixBase<DerivedObs>& obs) {
  const Index d = joint.dim();
  require_dims(split >= 0 && split <= d, "split index");
  require_dims(obs.size() == d - split, "observation length vs trailing block");
  const Index q = d - split;
  if (q == 0) return joint;

  const auto s11 = joint.cov.topLeftCorner(split, split);
  const auto s12 = joint.cov.topRightCorner(split, q);
  const Matrix<Scalar> s22 = joint.cov.bottomRightCorner(q, q);
  const Cholesky<Scalar> chol(s22, "trailing covariance block");

  const Vector<Scalar> residual = obs - joint.mean.tail(q);
  const Matrix<Scalar> whitened = chol.whiten(s12.transpose());  // L^{-1} S21

  Vector<Scalar> mean = joint.mean.head(split) + s12 * chol.solve(residual);
  Matrix<Scalar> cov = s11;
  cov.noalias() -= whitened.transpose() * whitened;
  return {std::move(mean), symmetrized(cov)};
}

/// `count` i.i.d. draws, one per row.
template <typename Scalar>
Matrix<Scalar> sample(const MvnDist<Scalar>& dist, Index count, Rng& rng) {
  const Matrix<Scalar> lower = sampling_factor(dist.cov);
  Matrix<Scalar> draws(count, dist.dim());
  for (Index r = 0; r < count; ++r) {
    draws.row(r) = (dist.mean + lower * standard_normal<Scalar>(dist.dim(), rng)).transpose();
  }
  return draws;
}

template <typename Scalar, typename Derived>
Scalar log_density(const Cholesky<Scalar>& chol, const Vector<Scalar>& mean,
                   const Eigen::MatrixBase<Derived>& x) {
  const Vector<Scalar> u = chol.whiten(x - mean);
  const auto d = static_cast<Scalar>(mean.size());
  return Scalar(-0.5) * (d * std::log(Scalar(2) * std::numbers::pi_v<Scalar>) + chol.log_determinant() +
                         u.squaredNorm());
}

/// Log of the normal density at x, via the Cholesky factor of the covariance.
template <typename Scalar, typename Derived>
Scalar log_density(const MvnDist<Scalar>& dist, const Eigen::MatrixBase<Derived>& x) {
  require_dims(x.size() == dist.dim(), "point vs distribution dimension");
  return log_density(Cholesky<Scalar>(dist.cov), dist.mean, x);
}

}  // namespace anchored

#endif  // ANCHORED_MVN_HPP
