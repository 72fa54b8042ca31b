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

#ifndef ANCHORED_DATA_HPP
#define ANCHORED_DATA_HPP

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "anchored/field.hpp"
#include "anchored/linalg.hpp"
#include "anchored/rng.hpp"

namespace anchored {

enum class ErrorKind { none, diagonal_normal };

/// Independent additive observation error.
struct ErrorDist {
  ErrorKind kind = ErrorKind::none;
  VectorXd sd;

  static ErrorDist none() { return {}; }
  static ErrorDist diagonal_normal(VectorXd sd);

  /// True when every draw is exactly zero.
  bool is_degenerate() const { return kind == ErrorKind::none || sd.isZero(0.0); }
  VectorXd draw(Index size, Rng& rng) const;
  void validate(Index size) const;
};

/// Linear observations z_a = H_a y + e_a, here point values at grid locations.
struct TypeAData {
  std::vector<double> locations;
  VectorXd values;
  ErrorDist error;

  Index size() const { return values.size(); }
  MatrixXd functionals(const Grid1D& grid) const;
  void validate() const;
};

/// Observations of the forward output, z_b = M(y)[indices] + e_b.
struct TypeBData {
  std::vector<Index> indices;
  VectorXd values;
  ErrorDist error;

  Index size() const { return values.size(); }
  void validate() const;
};

/// theta_a = z_a - e*, e* drawn from the type-A error distribution.
VectorXd assign_typeA_anchors(const TypeAData& data, Rng& rng);

/// m + e, e drawn from `error`.
VectorXd perturb_forward_output(const VectorXd& m, const ErrorDist& error, Rng& rng);

/// `location value [sd]` per line; '#' starts a comment.
TypeAData read_typeA(std::istream& in);
TypeAData read_typeA_file(const std::filesystem::path& path);
void write_typeA(std::ostream& out, const TypeAData& data);

/// `index value [sd]` per line, index into the forward-output vector.
TypeBData read_typeB(std::istream& in);
TypeBData read_typeB_file(const std::filesystem::path& path);
void write_typeB(std::ostream& out, const TypeBData& data);

}  // namespace anchored

#endif  // ANCHORED_DATA_HPP
