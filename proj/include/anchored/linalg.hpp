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

#ifndef ANCHORED_LINALG_HPP
#define ANCHORED_LINALG_HPP

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace anchored {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Raised when a covariance block cannot be factorized even after jitter.
class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require_dims(bool ok, const std::string& what) {
  if (!ok) throw DimensionError("dimension mismatch: " + what);
}

/// Relative diagonal jitter levels tried after a plain factorization fails.
inline constexpr double kJitterFirst = 1e-10;
inline constexpr double kJitterSecond = 1e-6;

/**
 * Cholesky factor of a symmetric positive (semi-)definite matrix.
 *
 * The plain factorization is attempted first. On failure the diagonal is
 * loaded with 1e-10 x (mean diagonal), then 1e-6 x (mean diagonal); if
 * both fail a SingularMatrixError is thrown. Only the lower triangle of
 * the input is read.
 */
template <typename Scalar>
class Cholesky {
 public:
  using MatrixType = Matrix<Scalar>;

  explicit Cholesky(const MatrixType& a, const char* context = "covariance") {
    if (a.rows() != a.cols()) throw DimensionError(std::string(context) + " is not square");
    if (a.rows() == 0) {
      lower_.resize(0, 0);
      return;
    }
    if (try_factor(a, Scalar(0))) return;
    const Scalar scale = a.diagonal().mean();
    if (!(scale > Scalar(0)) || !std::isfinite(static_cast<double>(scale))) {
      throw SingularMatrixError(std::string("singular ") + context);
    }
    for (double level : {kJitterFirst, kJitterSecond}) {
      if (try_factor(a, Scalar(level) * scale)) return;
    }
    throw SingularMatrixError(std::string("singular ") + context + " beyond jitter tolerance");
  }

  Index size() const { return lower_.rows(); }
  const MatrixType& matrixL() const { return lower_; }
  Scalar jitter() const { return jitter_; }

  /// Solves A x = b for the (jittered) factorized A.
  template <typename Rhs>
  auto solve(const Eigen::MatrixBase<Rhs>& b) const {
    using Plain = typename Rhs::PlainObject;
    Plain x = lower_.template triangularView<Eigen::Lower>().solve(b);
    lower_.transpose().template triangularView<Eigen::Upper>().solveInPlace(x);
    return x;
  }

  /// Returns L^{-1} b, the whitened right-hand side.
  template <typename Rhs>
  auto whiten(const Eigen::MatrixBase<Rhs>& b) const {
    using Plain = typename Rhs::PlainObject;
    Plain x = lower_.template triangularView<Eigen::Lower>().solve(b);
    return x;
  }

  Scalar log_determinant() const {
    return Scalar(2) * lower_.diagonal().array().log().sum();
  }

 private:
  bool try_factor(const MatrixType& a, Scalar jitter) {
    MatrixType work = a;
    if (jitter > Scalar(0)) work.diagonal().array() += jitter;
    Eigen::LLT<MatrixType> llt(work);
    if (llt.info() != Eigen::Success) return false;
    lower_ = llt.matrixL();
    if (!lower_.allFinite()) return false;
    jitter_ = jitter;
    return true;
  }

  MatrixType lower_;
  Scalar jitter_ = Scalar(0);
};

/// Lower factor suitable for drawing N(0, a); an exactly zero matrix maps to zero.
template <typename Scalar>
Matrix<Scalar> sampling_factor(const Matrix<Scalar>& a) {
  if (a.size() == 0 || a.isZero(Scalar(0))) return Matrix<Scalar>::Zero(a.rows(), a.cols());
  return Cholesky<Scalar>(a).matrixL();
}

template <typename Derived>
typename Derived::PlainObject symmetrized(const Eigen::MatrixBase<Derived>& a) {
  return (a + a.transpose()) / typename Derived::Scalar(2);
}

template <typename Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& a, double rel_tol = 1e-12) {
  if (a.rows() != a.cols()) return false;
  if (a.size() == 0) return true;
  const double scale = std::max(1.0, static_cast<double>(a.cwiseAbs().maxCoeff()));
  return static_cast<double>((a - a.transpose()).cwiseAbs().maxCoeff()) <= rel_tol * scale;
}

}  // namespace anchored

#endif  // ANCHORED_LINALG_HPP
