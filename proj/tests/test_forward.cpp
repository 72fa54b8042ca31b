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
#include <filesystem>
#include <fstream>
#include <random>

#include "anchored/forward.hpp"
#include "oracles.hpp"

using namespace anchored;

TEST_CASE("constant field without sources gives the linear profile") {
  for (double c : {0.01, 1.0, 250.0}) {
    const VectorXd z = solve_process(VectorXd::Constant(80, c), VectorXd::Zero(80), 1.0, 0.0);
    double err = 0.0;
    for (Index i = 0; i < 80; ++i) err = std::max(err, std::abs(z(i) - (1.0 - i / 79.0)));
    CHECK(err < 1e-12);
  }
}

TEST_CASE("five-node case with a central source") {
  VectorXd y(5), s(5);
  y << 1, 2, 4, 2, 1;
  s << 0, 0, 8, 0, 0;
  const VectorXd z = solve_process(y, s, 0.0, 0.0);
  // Dense solve of the same system gives (0, -3, -4.5, -3, 0).
  VectorXd want(5);
  want << 0.0, -3.0, -4.5, -3.0, 0.0;
  CHECK((oracle::dense_diffusion(y, s, 0.0, 0.0) - want).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((z - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("random small instances match the dense solve") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> pos(0.1, 10.0);
  std::normal_distribution<double> z;
  for (int rep = 0; rep < 50; ++rep) {
    const Index g = 3 + rep % 18;
    VectorXd y(g), s(g);
    for (Index i = 0; i < g; ++i) {
      y(i) = pos(rng);
      s(i) = z(rng);
    }
    const double zl = z(rng), zr = z(rng);
    const VectorXd got = solve_process(y, s, zl, zr);
    const VectorXd want = oracle::dense_diffusion(y, s, zl, zr);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("flux is constant without sources") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> pos(0.5, 50.0);
  VectorXd y(30);
  for (Index i = 0; i < 30; ++i) y(i) = pos(rng);
  const VectorXd z = solve_process(y, VectorXd::Zero(30), 100.0, 300.0);
  const auto flux = [&](Index i) { return 2.0 * y(i) * y(i + 1) / (y(i) + y(i + 1)) * (z(i + 1) - z(i)); };
  for (Index i = 1; i < 29; ++i) CHECK(std::abs(flux(i) - flux(0)) < 1e-10 * std::abs(flux(0)));
}

TEST_CASE("nonpositive field is a domain error") {
  VectorXd y = VectorXd::Ones(5);
  y(2) = 0.0;
  CHECK_THROWS_AS(solve_process(y, VectorXd::Zero(5), 1.0, 0.0), std::domain_error);
  y(2) = -1.0;
  CHECK_THROWS_AS(solve_process(y, VectorXd::Zero(5), 1.0, 0.0), std::domain_error);
}

namespace {

ForwardSpec two_processes(Index g) {
  ForwardSpec spec;
  ForwardProcess p1;
  p1.source = VectorXd::Zero(g);
  p1.z_left = 1.0;
  p1.z_right = 0.0;
  p1.observations = {1, 3};
  ForwardProcess p2;
  p2.source = VectorXd::Zero(g);
  p2.source(2) = 5.0;
  p2.z_left = 10.0;
  p2.z_right = 30.0;
  p2.observations = {2};
  spec.processes = {p1, p2};
  return spec;
}

}  // namespace

TEST_CASE("outputs are ordered by process then observation") {
  const ForwardSpec spec = two_processes(6);
  CHECK(spec.output_size() == 3);
  const VectorXd y = VectorXd::Constant(6, 2.0);
  const VectorXd out = evaluate_natural(spec, y);
  const VectorXd z1 = solve_process(y, spec.processes[0].source, 1.0, 0.0);
  const VectorXd z2 = solve_process(y, spec.processes[1].source, 10.0, 30.0);
  CHECK(out(0) == z1(1));
  CHECK(out(1) == z1(3));
  CHECK(out(2) == z2(2));

  const auto t = Transform<double>::log();
  const VectorXd via_model = evaluate(spec, t.apply(y), t);
  CHECK((via_model - out).cwiseAbs().maxCoeff() < 1e-12);

  const DiffusionForward model(spec, 6);
  CountingForward counting(model);
  CHECK((counting.run(y) - out).norm() == 0.0);
  CHECK(counting.count() == 1);
}

TEST_CASE("spec validation") {
  ForwardSpec spec = two_processes(6);
  spec.processes[0].observations.push_back(6);
  CHECK_THROWS(spec.validate(6));
  CHECK_THROWS(ForwardSpec{}.validate(6));
}

TEST_CASE("external command round trip") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "anchored_external_test";
  fs::create_directories(dir);
  const fs::path script = dir / "double.sh";
  {
    std::ofstream out(script);
    out << "#!/bin/sh\nawk '{ print 2 * $1 }' \"$1\" | head -n 3 > \"$2\"\n";
  }
  fs::permissions(script, fs::perms::owner_all);
  const ExternalForward model(script.string(), 3, dir);
  VectorXd y(4);
  y << 1.5, 2.0, 3.25, 9.0;
  const VectorXd out = model.run(y);
  REQUIRE(out.size() == 3);
  CHECK(out(0) == 3.0);
  CHECK(out(2) == 6.5);

  const ExternalForward wrong(script.string(), 4, dir);
  CHECK_THROWS(wrong.run(y));
  const ExternalForward failing("false", 1, dir);
  CHECK_THROWS(failing.run(y));
  fs::remove_all(dir);
}
