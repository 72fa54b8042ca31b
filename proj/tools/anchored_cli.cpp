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

// Command-line driver: truth, invert, fields, density, stats.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "anchored/config.hpp"
#include "anchored/data.hpp"
#include "anchored/engine.hpp"
#include "anchored/io.hpp"
#include "anchored/mixture.hpp"

namespace fs = std::filesystem;
using namespace anchored;

namespace {

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto end = s.find(sep, start);
    out.push_back(s.substr(start, end == std::string::npos ? std::string::npos : end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

int run_truth(const fs::path& config_path, const fs::path& out) {
  const ScenarioConfig config = load_config(config_path);
  const auto forward = make_forward(config);
  const TruthOutputs truth = make_truth(config, *forward);
  write_truth(out, config, truth);
  fmt::print("wrote truth ({} nodes, {} type-A, {} type-B values) to {}\n", truth.natural.size(), truth.type_a.size(),
             truth.type_b.size(), out.string());
  return 0;
}

struct InvertOptions {
  fs::path config;
  fs::path out;
  std::string scenario;
  std::optional<long> sample_size;
  std::optional<long> neighbors;
  std::optional<double> bandwidth;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string type_a;
  std::string type_b;
};

int run_invert(const InvertOptions& o) {
  ScenarioConfig config = load_config(o.config);
  if (!o.scenario.empty()) config.kind = scenario_kind_from_string(o.scenario);
  if (o.sample_size) config.sample_size = *o.sample_size;
  if (o.neighbors) config.neighbors = *o.neighbors;
  if (o.bandwidth) config.bandwidth = *o.bandwidth;
  if (o.seed) config.seed = *o.seed;
  if (o.workers) config.workers = *o.workers;
  if (!o.type_a.empty()) config.type_a = read_typeA_file(o.type_a);
  if (!o.type_b.empty()) config.type_b = read_typeB_file(o.type_b);

  const RunArtifacts art = run_inversion(config);
  write_run(o.out, config, art);
  fmt::print("scenario {}: n = {}, kept = {}, components = {}, ESS = {:.1f}, forward evaluations = {}\n",
             to_string(config.kind), config.sample_size, art.parameter_sample.size(), art.posterior.size(), art.ess,
             art.forward_evaluations);
  return 0;
}

int run_fields(const fs::path& run_dir, std::optional<long> count, std::optional<std::uint64_t> seed,
               std::optional<int> workers, fs::path out) {
  LoadedRun run = load_run(run_dir);
  if (seed) run.config.seed = *seed;
  if (workers) run.config.workers = *workers;
  const Index n = count ? *count : run.config.posterior_draws;
  const auto forward = make_forward(run.config);
  const PosteriorRealizations r = draw_posterior_fields(run.config, run.posterior, n, *forward);
  if (out.empty()) out = run_dir;
  write_realizations(out, run.config, r);
  fmt::print("wrote {} posterior realizations to {}\n", n, out.string());
  return 0;
}

int run_density(const fs::path& run_dir, const std::string& coords_arg, long points, const std::string& range_arg,
                fs::path out) {
  const LoadedRun run = load_run(run_dir);
  const ParameterLayout layout = make_layout(run.config);
  const auto names = split_list(coords_arg, ',');
  if (names.empty() || names.size() > 2) throw std::invalid_argument("--coords takes one or two parameter names");
  std::vector<Index> coords;
  for (const auto& name : names) coords.push_back(layout.index_of(name));

  const VectorXd mean = mixture_mean(run.posterior);
  const MatrixXd cov = mixture_covariance(run.posterior);
  std::vector<std::pair<double, double>> ranges;
  const auto range_parts = range_arg.empty() ? std::vector<std::string>{} : split_list(range_arg, ',');
  for (std::size_t a = 0; a < coords.size(); ++a) {
    if (a < range_parts.size()) {
      const auto bounds = split_list(range_parts[a], ':');
      if (bounds.size() != 2) throw std::invalid_argument("--range entries look like lo:hi");
      ranges.emplace_back(std::stod(bounds[0]), std::stod(bounds[1]));
    } else {
      const double sd = std::sqrt(cov(coords[a], coords[a]));
      ranges.emplace_back(mean(coords[a]) - 4.0 * sd, mean(coords[a]) + 4.0 * sd);
    }
  }

  const auto axis = [&](std::size_t a, long i) {
    return ranges[a].first + (ranges[a].second - ranges[a].first) * static_cast<double>(i) / static_cast<double>(points - 1);
  };
  const Index total = coords.size() == 1 ? points : points * points;
  MatrixXd grid(total, static_cast<Index>(coords.size()));
  for (Index r = 0; r < total; ++r) {
    grid(r, 0) = axis(0, coords.size() == 1 ? r : r / points);
    if (coords.size() == 2) grid(r, 1) = axis(1, r % points);
  }
  const VectorXd density = mixture_marginal_density(run.posterior, coords, grid);
  MatrixXd table(total, grid.cols() + 1);
  table << grid, density;
  auto header = names;
  header.push_back("density");
  if (out.empty()) out = run_dir / fmt::format("density_{}.csv", fmt::join(names, "_"));
  write_csv(out, header, table);
  fmt::print("wrote {} density values to {}\n", total, out.string());
  return 0;
}

int run_stats(const fs::path& run_dir, fs::path realizations, const fs::path& truth_dir) {
  const LoadedRun run = load_run(run_dir);
  if (realizations.empty()) realizations = run_dir;
  if (!run.config.type_b) throw std::invalid_argument("run has no type-B data to compare against");
  const CsvTable reps = read_csv(realizations / "reproductions.csv");
  const auto rows = reproduction_stats(reps.values, run.config.type_b->values);
  std::vector<double> keys;
  for (Index idx : run.config.type_b->indices) keys.push_back(static_cast<double>(idx));
  write_quantile_table(realizations / "reproduction_stats.csv", rows, "index", keys);
  const auto covered = std::count_if(rows.begin(), rows.end(), [](const QuantileRow& r) { return r.covered; });
  fmt::print("type-B reproduction: {} of {} observations inside the 5-95 % band\n", covered, rows.size());

  if (!truth_dir.empty()) {
    const ParameterLayout layout = make_layout(run.config);
    const CsvTable params = read_csv(realizations / "posterior_parameters.csv");
    const CsvTable truth = read_csv(truth_dir / "truth_anchors.csv");
    require_dims(truth.values.rows() == layout.inverted, "truth anchors vs run anchors");
    MatrixXd drawn(params.values.rows(), layout.inverted);
    for (Index j = 0; j < layout.inverted; ++j) drawn.col(j) = params.values.col(params.column(fmt::format("anchor{}", j)));
    const VectorXd true_values = truth.values.col(1);
    const auto anchor_rows = reproduction_stats(drawn, true_values);
    std::vector<double> locations(truth.values.col(0).data(), truth.values.col(0).data() + truth.values.rows());
    write_quantile_table(realizations / "anchor_stats.csv", anchor_rows, "location", locations);
    std::vector<double> errors;
    for (Index r = 0; r < drawn.rows(); ++r) {
      for (Index j = 0; j < drawn.cols(); ++j) errors.push_back(std::abs(drawn(r, j) - true_values(j)));
    }
    fmt::print("inverted anchors: median absolute error {:.6g} (model unit)\n", quantile(errors, 0.5));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anchored inversion of Gaussian random fields"};
  app.require_subcommand(1);

  fs::path truth_config, truth_out;
  auto* truth = app.add_subcommand("truth", "Emit a synthetic truth field and its type-A / type-B data files");
  truth->add_option("--config", truth_config, "Scenario configuration (JSON)")->required()->check(CLI::ExistingFile);
  truth->add_option("--out", truth_out, "Output directory")->required();

  InvertOptions inv;
  auto* invert = app.add_subcommand("invert", "Run a scenario and write the posterior mixture");
  invert->add_option("--config", inv.config, "Scenario configuration (JSON)")->required()->check(CLI::ExistingFile);
  invert->add_option("--out", inv.out, "Run directory")->required();
  invert->add_option("--scenario", inv.scenario, "A, AB or B (overrides config)");
  invert->add_option("-n,--sample-size", inv.sample_size, "Monte Carlo sample size");
  invert->add_option("-k,--neighbors", inv.neighbors, "Kernel neighbourhood size");
  invert->add_option("--bandwidth", inv.bandwidth, "Kernel covariance scaling");
  invert->add_option("--seed", inv.seed, "Random seed");
  invert->add_option("--workers", inv.workers, "Worker threads (0 = all cores)");
  invert->add_option("--typeA", inv.type_a, "Type-A data file (location value [sd])");
  invert->add_option("--typeB", inv.type_b, "Type-B data file (index value [sd])");

  fs::path fields_run, fields_out;
  std::optional<long> fields_count;
  std::optional<std::uint64_t> fields_seed;
  std::optional<int> fields_workers;
  auto* fields = app.add_subcommand("fields", "Draw posterior parameters, field realizations and forward reproductions");
  fields->add_option("--run", fields_run, "Run directory written by invert")->required()->check(CLI::ExistingDirectory);
  fields->add_option("--count", fields_count, "Number of realizations (default: posterior_draws)");
  fields->add_option("--seed", fields_seed, "Random seed (default: the run's seed)");
  fields->add_option("--workers", fields_workers, "Worker threads (0 = all cores)");
  fields->add_option("--out", fields_out, "Output directory (default: the run directory)");

  fs::path density_run, density_out;
  std::string density_coords, density_range;
  long density_points = 200;
  auto* density = app.add_subcommand("density", "Tabulate a 1-D or 2-D marginal posterior density");
  density->add_option("--run", density_run, "Run directory written by invert")->required()->check(CLI::ExistingDirectory);
  density->add_option("--coords", density_coords, "Parameter name(s), e.g. lambda or lambda,eta2")->required();
  density->add_option("--points", density_points, "Grid points per axis")->check(CLI::Range(2, 100000));
  density->add_option("--range", density_range, "lo:hi per axis in transformed units, comma separated");
  density->add_option("--out", density_out, "Output CSV");

  fs::path stats_run, stats_realizations, stats_truth;
  auto* stats = app.add_subcommand("stats", "Quantile and coverage tables for type-B reproductions");
  stats->add_option("--run", stats_run, "Run directory written by invert")->required()->check(CLI::ExistingDirectory);
  stats->add_option("--realizations", stats_realizations, "Directory written by fields (default: the run directory)");
  stats->add_option("--truth", stats_truth, "Directory written by truth, for anchor error statistics");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*truth) return run_truth(truth_config, truth_out);
    if (*invert) return run_invert(inv);
    if (*fields) return run_fields(fields_run, fields_count, fields_seed, fields_workers, fields_out);
    if (*density) return run_density(density_run, density_coords, density_points, density_range, density_out);
    if (*stats) return run_stats(stats_run, stats_realizations, stats_truth);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
