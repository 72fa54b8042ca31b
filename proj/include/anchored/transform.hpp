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

#ifndef ANCHORED_TRANSFORM_HPP
#define ANCHORED_TRANSFORM_HPP

#include <cmath>
#include <stdexcept>
#include <string>

#include "anchored/linalg.hpp"

namespace anchored {

enum class TransformKind { identity, log, logit };

/**
 * Monotone map from a parameter's natural domain onto the real line:
 * identity, log (x > 0) or logit on (lower, upper),
 * u = log((x - lower) / (upper - x)).
 */
template <typename Scalar = double>
struct Transform {
  TransformKind kind = TransformKind::identity;
  Scalar lower = Scalar(0);
  Scalar upper = Scalar(1);

  static Transform identity() { return {}; }
  static Transform log() { return {TransformKind::log, Scalar(0), Scalar(0)}; }
  static Transform logit(Scalar lo, Scalar hi) {
    if (!(lo < hi)) throw std::invalid_argument("logit transform needs lower < upper");
    return {TransformKind::logit, lo, hi};
  }

  bool in_domain(Scalar x) const {
    switch (kind) {
      case TransformKind::identity: return std::isfinite(x);
      case TransformKind::log: return x > Scalar(0) && std::isfinite(x);
      case TransformKind::logit: return x > lower && x < upper;
    }
    return false;
  }

  Scalar apply(Scalar x) const {
    if (!in_domain(x)) throw std::domain_error("transform argument outside its domain");
    switch (kind) {
      case TransformKind::identity: return x;
      case TransformKind::log: return std::log(x);
      case TransformKind::logit: return std::log((x - lower) / (upper - x));
    }
    return x;
  }

  Scalar invert(Scalar u) const {
    switch (kind) {
      case TransformKind::identity: return u;
      case TransformKind::log: return std::exp(u);
      case TransformKind::logit: {
        const Scalar width = upper - lower;
        if (u >= Scalar(0)) {
          const Scalar e = std::exp(-u);
          return lower + width / (Scalar(1) + e);
        }
        const Scalar e = std::exp(u);
        return lower + width * e / (Scalar(1) + e);
      }
    }
    return u;
  }

  template <typename Derived>
  Vector<Scalar> apply(const Eigen::MatrixBase<Derived>& x) const {
    Vector<Scalar> out(x.size());
    for (Index i = 0; i < x.size(); ++i) out(i) = apply(x(i));
    return out;
  }

  template <typename Derived>
  Vector<Scalar> invert(const Eigen::MatrixBase<Derived>& u) const {
    Vector<Scalar> out(u.size());
    for (Index i = 0; i < u.size(); ++i) out(i) = invert(u(i));
    return out;
  }

  bool operator==(const Transform&) const = default;
};

template <typename Scalar>
Scalar apply(const Transform<Scalar>& t, Scalar x) { return t.apply(x); }

template <typename Scalar>
Scalar invert(const Transform<Scalar>& t, Scalar u) { return t.invert(u); }

inline std::string to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::identity: return "identity";
    case TransformKind::log: return "log";
    case TransformKind::logit: return "logit";
  }
  return "identity";
}

inline TransformKind transform_kind_from_string(const std::string& name) {
  if (name == "identity") return TransformKind::identity;
  if (name == "log") return TransformKind::log;
  if (name == "logit") return TransformKind::logit;
  throw std::invalid_argument("unknown transform kind '" + name + "'");
}

}  // namespace anchored

#endif  // ANCHORED_TRANSFORM_HPP
