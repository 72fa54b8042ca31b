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
#include <sstream>

#include "anchored/data.hpp"

using namespace anchored;

TEST_CASE("error-free type-A data fix the measured anchors") {
  TypeAData d;
  d.locations = {2.0, 5.0};
  d.values = VectorXd::Zero(2);
  d.values << 1.5, -0.25;
  Rng rng = substream(1, StreamTag::typeA_assignment, 0);
  CHECK(assign_typeA_anchors(d, rng) == d.values);
}

TEST_CASE("noisy type-A assignment has unit spread around the data") {
  TypeAData d;
  d.locations = {3.0};
  d.values = VectorXd::Constant(1, 2.0);
  d.error = ErrorDist::diagonal_normal(VectorXd::Ones(1));
  const int n = 100000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    Rng rng = substream(2, StreamTag::typeA_assignment, static_cast<std::uint64_t>(i));
    const double e = assign_typeA_anchors(d, rng)(0) - 2.0;
    s1 += e;
    s2 += e * e;
  }
  const double m = s1 / n;
  const double v = (s2 - n * m * m) / (n - 1);
  CHECK(std::abs(m) < 3.0 / std::sqrt(double(n)));
  CHECK(std::abs(v - 1.0) < 3.0 * std::sqrt(2.0 / (n - 1)));
}

TEST_CASE("forward perturbation is independent across components") {
  const ErrorDist e = ErrorDist::diagonal_normal(VectorXd::Ones(2));
  Rng rng = substream(3, StreamTag::output_error, 0);
  const int n = 100000;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const VectorXd p = perturb_forward_output(VectorXd::Zero(2), e, rng);
    sx += p(0);
    sy += p(1);
    sxx += p(0) * p(0);
    syy += p(1) * p(1);
    sxy += p(0) * p(1);
  }
  const double vx = sxx / n - (sx / n) * (sx / n);
  const double vy = syy / n - (sy / n) * (sy / n);
  const double r = (sxy / n - sx * sy / (double(n) * n)) / std::sqrt(vx * vy);
  CHECK(std::abs(vx - 1.0) < 3.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(vy - 1.0) < 3.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(r) < 3.0 / std::sqrt(double(n)));
}

TEST_CASE("no error leaves outputs untouched") {
  VectorXd m(3);
  m << 1, 2, 3;
  Rng rng = substream(3, StreamTag::output_error, 0);
  CHECK(perturb_forward_output(m, ErrorDist::none(), rng) == m);
  CHECK(ErrorDist::diagonal_normal(VectorXd::Zero(3)).is_degenerate());
}

TEST_CASE("invalid error specifications") {
  CHECK_THROWS(ErrorDist::diagonal_normal(VectorXd::Constant(1, -1.0)));
  const ErrorDist e = ErrorDist::diagonal_normal(VectorXd::Ones(2));
  CHECK_THROWS(e.validate(3));
}

TEST_CASE("type-A functionals are unit selectors") {
  const Grid1D g = Grid1D::uniform(10, 1.0, 1.0);
  TypeAData d;
  d.locations = {1.0, 10.0};
  d.values = VectorXd::Zero(2);
  const MatrixXd h = d.functionals(g);
  CHECK(h(0, 0) == 1.0);
  CHECK(h(1, 9) == 1.0);
  CHECK(h.sum() == 2.0);
  d.locations = {1.5, 10.0};
  CHECK_THROWS(d.functionals(g));
}

TEST_CASE("data files round trip") {
  TypeAData a;
  a.locations = {2.0, 21.0};
  a.values = VectorXd::Zero(2);
  a.values << -5.9927273756818105, 0.1;
  a.error = ErrorDist::diagonal_normal(VectorXd::Constant(2, 0.5));
  std::stringstream sa;
  write_typeA(sa, a);
  const TypeAData ra = read_typeA(sa);
  CHECK(ra.locations == a.locations);
  CHECK(ra.values == a.values);
  CHECK(ra.error.kind == ErrorKind::diagonal_normal);
  CHECK(ra.error.sd == a.error.sd);

  std::stringstream sb("# index value\n0 1.25\n3 -148.37  # comment\n\n");
  const TypeBData rb = read_typeB(sb);
  CHECK(rb.indices == std::vector<Index>{0, 3});
  CHECK(rb.values(1) == -148.37);
  CHECK(rb.error.kind == ErrorKind::none);

  std::stringstream bad("0 1.0 2.0 3.0\n");
  CHECK_THROWS(read_typeB(bad));
}
