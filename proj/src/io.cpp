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

#include "anchored/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <fmt/ostream.h>

#include "anchored/rng.hpp"

namespace anchored {

namespace fs = std::filesystem;

Index CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::invalid_argument("no column '" + name + "'");
  return static_cast<Index>(it - header.begin());
}

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(line);
  while (std::getline(in, part, sep)) parts.push_back(part);
  return parts;
}

}  // namespace

void write_csv(const fs::path& path, const std::vector<std::string>& header, const MatrixXd& values) {
  require_dims(values.cols() == static_cast<Index>(header.size()) || values.rows() == 0, "csv header vs columns");
  auto out = open_output(path);
  fmt::print(out, "{}\n", fmt::join(header, ","));
  for (Index r = 0; r < values.rows(); ++r) {
    for (Index c = 0; c < values.cols(); ++c) fmt::print(out, c == 0 ? "{:.17g}" : ",{:.17g}", values(r, c));
    fmt::print(out, "\n");
  }
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + " is empty");
  table.header = split(line, ',');
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto parts = split(line, ',');
    if (parts.size() != table.header.size()) throw std::runtime_error("ragged row in " + path.string());
    std::vector<double> row;
    for (const auto& p : parts) row.push_back(std::stod(p));
    rows.push_back(std::move(row));
  }
  table.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(table.header.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) table.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  }
  return table;
}

VectorXd read_profile(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open profile " + path.string());
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    double v = 0.0;
    while (fields >> v) values.push_back(v);
  }
  return Eigen::Map<const VectorXd>(values.data(), static_cast<Index>(values.size()));
}

TruthOutputs make_truth(const ScenarioConfig& config, const ForwardModel& forward) {
  if (config.truth.profile.empty()) throw std::invalid_argument("config has no truth.profile");
  TruthOutputs t;
  t.natural = read_profile(config.truth.profile);
  require_dims(t.natural.size() == config.grid.size(), "truth profile vs grid size");
  t.model = config.field_transform.apply(t.natural);

  Rng rng = substream(config.seed, StreamTag::truth_noise, 0);
  const auto na = static_cast<Index>(config.typeA_locations.size());
  t.type_a.locations = config.typeA_locations;
  t.type_a.values.resize(na);
  for (Index i = 0; i < na; ++i) t.type_a.values(i) = t.model(config.grid.index_of(config.typeA_locations[static_cast<std::size_t>(i)]));
  if (config.truth.typeA_sd > 0.0) {
    t.type_a.error = ErrorDist::diagonal_normal(VectorXd::Constant(na, config.truth.typeA_sd));
    t.type_a.values = perturb_forward_output(t.type_a.values, t.type_a.error, rng);
  }

  const VectorXd outputs = forward.run(t.natural);
  const Index q = outputs.size();
  t.type_b.values = outputs;
  for (Index i = 0; i < q; ++i) t.type_b.indices.push_back(i);
  if (config.truth.typeB_sd > 0.0) {
    t.type_b.error = ErrorDist::diagonal_normal(VectorXd::Constant(q, config.truth.typeB_sd));
    t.type_b.values = perturb_forward_output(t.type_b.values, t.type_b.error, rng);
  }
  return t;
}

void write_truth(const fs::path& dir, const ScenarioConfig& config, const TruthOutputs& truth) {
  fs::create_directories(dir);
  const Index g = config.grid.size();
  MatrixXd table(g, 3);
  table << config.grid.locations(), truth.natural, truth.model;
  write_csv(dir / "truth.csv", {"location", "natural", "model"}, table);
  {
    auto out = open_output(dir / "typeA.txt");
    write_typeA(out, truth.type_a);
  }
  {
    auto out = open_output(dir / "typeB.txt");
    write_typeB(out, truth.type_b);
  }
  MatrixXd anchors(static_cast<Index>(config.anchor_locations.size()), 2);
  for (Index j = 0; j < anchors.rows(); ++j) {
    const double loc = config.anchor_locations[static_cast<std::size_t>(j)];
    anchors.row(j) << loc, truth.model(config.grid.index_of(loc));
  }
  write_csv(dir / "truth_anchors.csv", {"location", "model"}, anchors);

  if (config.diffusion) {
    std::vector<std::string> header{"location"};
    MatrixXd profiles(g, 1 + static_cast<Index>(config.diffusion->processes.size()));
    profiles.col(0) = config.grid.locations();
    Index c = 1;
    for (const auto& p : config.diffusion->processes) {
      header.push_back(fmt::format("process{}", c - 1));
      profiles.col(c++) = solve_process(truth.natural, p.source, p.z_left, p.z_right);
    }
    write_csv(dir / "truth_forward.csv", header, profiles);
  }
}

void write_run(const fs::path& dir, const ScenarioConfig& config, const RunArtifacts& art) {
  fs::create_directories(dir);
  {
    auto out = open_output(dir / "config.json");
    out << to_json(config).dump(2) << "\n";
  }
  {
    auto out = open_output(dir / "mixture.txt");
    write_mixture(out, art.posterior);
  }
  const auto names = art.layout.names();
  const auto n = static_cast<Index>(art.parameter_sample.size());
  MatrixXd transformed(n, art.layout.size());
  MatrixXd structural(n, 2 + art.layout.trend_dim);
  for (Index i = 0; i < n; ++i) {
    const auto& p = art.parameter_sample[static_cast<std::size_t>(i)];
    transformed.row(i) = to_transformed(p, art.layout, config.transforms).transpose();
    structural.row(i) << p.structural.lambda, p.structural.eta2, p.structural.beta.transpose();
  }
  write_csv(dir / "parameter_sample.csv", names, transformed);
  std::vector<std::string> structural_names{"lambda", "eta2"};
  for (Index j = 0; j < art.layout.trend_dim; ++j) structural_names.push_back(fmt::format("beta{}", j));
  write_csv(dir / "structural_sample.csv", structural_names, structural);

  if (art.joint.size() > 0) {
    auto header = names;
    header.insert(header.end(), art.output_names.begin(), art.output_names.end());
    write_csv(dir / "joint_sample.csv", header, art.joint.points);
  }
  if (art.lambda_grid.size() > 0) {
    MatrixXd lp(art.lambda_grid.size(), 2);
    lp << art.lambda_grid, art.lambda_probabilities;
    write_csv(dir / "lambda_posterior.csv", {"lambda", "probability"}, lp);
  }
  MatrixXd weights(art.posterior.size(), 1);
  weights.col(0) = art.posterior.weights();
  write_csv(dir / "posterior_weights.csv", {"weight"}, weights);

  auto log = open_output(dir / "run.log");
  fmt::print(log, "scenario = {}\nseed = {}\nsample_size = {}\nneighbors = {}\nbandwidth = {:.17g}\n", to_string(config.kind),
             config.seed, config.sample_size, art.neighbors_used, config.bandwidth);
  fmt::print(log, "discarded = {}\nforward_evaluations = {}\ncomponents = {}\ness = {:.17g}\n", art.discarded,
             art.forward_evaluations, art.posterior.size(), art.ess);
}

LoadedRun load_run(const fs::path& dir) {
  LoadedRun run{load_config(dir / "config.json"), {}};
  std::ifstream in(dir / "mixture.txt");
  if (!in) throw std::runtime_error("cannot open " + (dir / "mixture.txt").string());
  run.posterior = read_mixture(in);
  return run;
}

void write_realizations(const fs::path& dir, const ScenarioConfig& config, const PosteriorRealizations& r) {
  fs::create_directories(dir);
  const ParameterLayout layout = make_layout(config);
  const auto count = static_cast<Index>(r.parameters.size());
  std::vector<std::string> header{"lambda", "eta2"};
  for (Index j = 0; j < layout.trend_dim; ++j) header.push_back(fmt::format("beta{}", j));
  for (Index j = 0; j < layout.measured_total; ++j) header.push_back(fmt::format("measured{}", j));
  for (Index j = 0; j < layout.inverted; ++j) header.push_back(fmt::format("anchor{}", j));
  MatrixXd params(count, static_cast<Index>(header.size()));
  for (Index i = 0; i < count; ++i) {
    const auto& p = r.parameters[static_cast<std::size_t>(i)];
    params.row(i) << p.structural.lambda, p.structural.eta2, p.structural.beta.transpose(), p.anchor_values.transpose();
  }
  write_csv(dir / "posterior_parameters.csv", header, params);

  std::vector<std::string> field_header;
  for (Index g = 0; g < config.grid.size(); ++g) field_header.push_back(fmt::format("x{:g}", config.grid.locations()(g)));
  write_csv(dir / "fields.csv", field_header, r.fields);
  MatrixXd natural(r.fields.rows(), r.fields.cols());
  for (Index i = 0; i < r.fields.rows(); ++i) natural.row(i) = config.field_transform.invert(r.fields.row(i).transpose()).transpose();
  write_csv(dir / "fields_natural.csv", field_header, natural);

  std::vector<std::string> out_header;
  if (config.type_b) {
    for (Index idx : config.type_b->indices) out_header.push_back(fmt::format("out{}", idx));
  } else {
    for (Index c = 0; c < r.reproductions.cols(); ++c) out_header.push_back(fmt::format("out{}", c));
  }
  write_csv(dir / "reproductions.csv", out_header, r.reproductions);
}

void write_quantile_table(const fs::path& path, const std::vector<QuantileRow>& rows, const std::string& key_name,
                          const std::vector<double>& keys) {
  require_dims(keys.size() == rows.size(), "quantile table keys vs rows");
  MatrixXd table(static_cast<Index>(rows.size()), 9);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    table.row(static_cast<Index>(i)) << keys[i], row.observed, row.quantiles[0], row.quantiles[1], row.quantiles[2],
        row.quantiles[3], row.quantiles[4], row.covered ? 1.0 : 0.0, row.median_abs_deviation;
  }
  write_csv(path, {key_name, "observed", "q05", "q25", "q50", "q75", "q95", "covered", "median_abs_deviation"}, table);
}

}  // namespace anchored
