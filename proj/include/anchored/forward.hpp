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

#ifndef ANCHORED_FORWARD_HPP
#define ANCHORED_FORWARD_HPP

#include <atomic>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "anchored/linalg.hpp"
#include "anchored/transform.hpp"

namespace anchored {

/**
 * Discrete solution of d/dx (y dz/dx) = s on a unit-spacing grid with
 * Dirichlet values at the first and last node. Interface coefficients are
 * harmonic means of neighbouring y; the source enters as a cell integral.
 * Solved by tridiagonal elimination.
 */
VectorXd solve_process(const VectorXd& field, const VectorXd& source, double z_left, double z_right);

/// One boundary-value problem and the nodes at which its solution is observed.
struct ForwardProcess {
  VectorXd source;
  double z_left = 0.0;
  double z_right = 0.0;
  std::vector<Index> observations;
};

/// Processes whose observed values are concatenated in order.
struct ForwardSpec {
  std::vector<ForwardProcess> processes;

  Index output_size() const;
  void validate(Index grid_size) const;
};

/// Runs every process on a natural-unit field and concatenates the observations.
VectorXd evaluate_natural(const ForwardSpec& spec, const VectorXd& natural_field);

/// Back-transforms a model-unit field to natural units, then evaluates.
VectorXd evaluate(const ForwardSpec& spec, const VectorXd& model_field, const Transform<double>& field_transform);

/// Deterministic, reentrant map from a natural-unit field to predicted observations.
class ForwardModel {
 public:
  virtual ~ForwardModel() = default;
  virtual VectorXd run(const VectorXd& natural_field) const = 0;
  virtual Index output_size() const = 0;
};

class DiffusionForward final : public ForwardModel {
 public:
  DiffusionForward(ForwardSpec spec, Index grid_size);
  VectorXd run(const VectorXd& natural_field) const override;
  Index output_size() const override { return spec_.output_size(); }
  const ForwardSpec& spec() const { return spec_; }

 private:
  ForwardSpec spec_;
  Index grid_size_;
};

/**
 * User executable invoked as `command <field-file> <output-file>`. The field
 * is written one natural-unit value per line; the executable writes one
 * output value per line.
 */
class ExternalForward final : public ForwardModel {
 public:
  ExternalForward(std::string command, Index output_size, std::filesystem::path work_dir = {});
  VectorXd run(const VectorXd& natural_field) const override;
  Index output_size() const override { return output_size_; }

 private:
  std::string command_;
  Index output_size_;
  std::filesystem::path work_dir_;
  mutable std::atomic<unsigned long long> calls_{0};
};

/// Wraps a model and counts evaluations.
class CountingForward final : public ForwardModel {
 public:
  explicit CountingForward(const ForwardModel& inner) : inner_(inner) {}
  VectorXd run(const VectorXd& natural_field) const override {
    count_.fetch_add(1, std::memory_order_relaxed);
    return inner_.run(natural_field);
  }
  Index output_size() const override { return inner_.output_size(); }
  unsigned long long count() const { return count_.load(); }

 private:
  const ForwardModel& inner_;
  mutable std::atomic<unsigned long long> count_{0};
};

}  // namespace anchored

#endif  // ANCHORED_FORWARD_HPP
