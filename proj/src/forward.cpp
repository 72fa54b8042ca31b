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

#include "anchored/forward.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <unistd.h>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace anchored {

VectorXd solve_process(const VectorXd& field, const VectorXd& source, double z_left, double z_right) {
  const Index g = field.size();
  require_dims(source.size() == g, "source vs field length");
  if (g < 2) throw std::invalid_argument("forward grid needs at least two nodes");
  if (!field.allFinite() || (field.array() <= 0.0).any()) {
    throw std::domain_error("forward field must be positive and finite");
  }

  VectorXd z(g);
  z(0) = z_left;
  z(g - 1) = z_right;
  if (g == 2) return z;

  // Harmonic-mean transmissibility between node i and i + 1.
  VectorXd t(g - 1);
  for (Index i = 0; i + 1 < g; ++i) t(i) = 2.0 * field(i) * field(i + 1) / (field(i) + field(i + 1));

  // Interior rows i = 1..g-2:  t(i-1) z(i-1) - (t(i-1) + t(i)) z(i) + t(i) z(i+1) = s(i).
  const Index m = g - 2;
  VectorXd lower(m), diag(m), upper(m), rhs(m);
  for (Index r = 0; r < m; ++r) {
    const Index i = r + 1;
    lower(r) = t(i - 1);
    diag(r) = -(t(i - 1) + t(i));
    upper(r) = t(i);
    rhs(r) = source(i);
  }
  rhs(0) -= lower(0) * z_left;
  rhs(m - 1) -= upper(m - 1) * z_right;

  // Thomas algorithm.
  for (Index r = 1; r < m; ++r) {
    if (diag(r - 1) == 0.0) throw std::runtime_error("singular tridiagonal system");
    const double f = lower(r) / diag(r - 1);
    diag(r) -= f * upper(r - 1);
    rhs(r) -= f * rhs(r - 1);
  }
  if (diag(m - 1) == 0.0) throw std::runtime_error("singular tridiagonal system");
  z(m) = rhs(m - 1) / diag(m - 1);
  for (Index r = m - 2; r >= 0; --r) z(r + 1) = (rhs(r) - upper(r) * z(r + 2)) / diag(r);
  if (!z.allFinite()) throw std::runtime_error("forward solution is not finite");
  return z;
}

Index ForwardSpec::output_size() const {
  Index total = 0;
  for (const auto& p : processes) total += static_cast<Index>(p.observations.size());
  return total;
}

void ForwardSpec::validate(Index grid_size) const {
  if (processes.empty()) throw std::invalid_argument("forward spec needs at least one process");
  for (const auto& p : processes) {
    require_dims(p.source.size() == grid_size, "process source vs grid size");
    for (Index idx : p.observations) {
      if (idx < 0 || idx >= grid_size) throw std::invalid_argument(fmt::format("observation index {} outside grid", idx));
    }
  }
}

VectorXd evaluate_natural(const ForwardSpec& spec, const VectorXd& natural_field) {
  VectorXd out(spec.output_size());
  Index k = 0;
  for (const auto& p : spec.processes) {
    const VectorXd z = solve_process(natural_field, p.source, p.z_left, p.z_right);
    for (Index idx : p.observations) out(k++) = z(idx);
  }
  return out;
}

VectorXd evaluate(const ForwardSpec& spec, const VectorXd& model_field, const Transform<double>& field_transform) {
  spec.validate(model_field.size());
  return evaluate_natural(spec, field_transform.invert(model_field));
}

DiffusionForward::DiffusionForward(ForwardSpec spec, Index grid_size) : spec_(std::move(spec)), grid_size_(grid_size) {
  spec_.validate(grid_size_);
}

VectorXd DiffusionForward::run(const VectorXd& natural_field) const {
  require_dims(natural_field.size() == grid_size_, "field vs grid size");
  return evaluate_natural(spec_, natural_field);
}

ExternalForward::ExternalForward(std::string command, Index output_size, std::filesystem::path work_dir)
    : command_(std::move(command)), output_size_(output_size), work_dir_(std::move(work_dir)) {
  if (command_.empty()) throw std::invalid_argument("external forward command is empty");
  if (output_size_ <= 0) throw std::invalid_argument("external forward output size must be positive");
  if (work_dir_.empty()) work_dir_ = std::filesystem::temp_directory_path();
  std::filesystem::create_directories(work_dir_);
}

VectorXd ExternalForward::run(const VectorXd& natural_field) const {
  const auto call = calls_.fetch_add(1);
  const auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
  const auto stem = fmt::format("forward_{}_{}_{}", ::getpid(), tid, call);
  const auto in_path = work_dir_ / (stem + ".in");
  const auto out_path = work_dir_ / (stem + ".out");
  {
    std::ofstream in(in_path);
    for (Index i = 0; i < natural_field.size(); ++i) fmt::print(in, "{:.17g}\n", natural_field(i));
    if (!in) throw std::runtime_error("cannot write " + in_path.string());
  }
  const auto cmd = fmt::format("{} '{}' '{}'", command_, in_path.string(), out_path.string());
  const int status = std::system(cmd.c_str());
  std::filesystem::remove(in_path);
  if (status != 0) {
    std::filesystem::remove(out_path);
    throw std::runtime_error(fmt::format("external forward command failed with status {}", status));
  }

  VectorXd out(output_size_);
  std::ifstream result(out_path);
  for (Index i = 0; i < output_size_; ++i) {
    if (!(result >> out(i))) {
      std::filesystem::remove(out_path);
      throw std::runtime_error(fmt::format("external forward produced fewer than {} values", output_size_));
    }
  }
  result.close();
  std::filesystem::remove(out_path);
  return out;
}

}  // namespace anchored
