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

#ifndef ANCHORED_IO_HPP
#define ANCHORED_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "anchored/config.hpp"
#include "anchored/engine.hpp"
#include "anchored/linalg.hpp"

namespace anchored {

/// Numeric table with a header row.
struct CsvTable {
  std::vector<std::string> header;
  MatrixXd values;

  Index column(const std::string& name) const;
};

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header, const MatrixXd& values);
CsvTable read_csv(const std::filesystem::path& path);

/// Reads a natural-unit profile: one value per line, '#' comments.
VectorXd read_profile(const std::filesystem::path& path);

/// Files written by the `truth` command.
struct TruthOutputs {
  VectorXd natural;
  VectorXd model;
  TypeAData type_a;
  TypeBData type_b;
};

/// Synthetic truth from the configured profile: type-A values at typeA_locations, type-B from the forward model.
TruthOutputs make_truth(const ScenarioConfig& config, const ForwardModel& forward);
void write_truth(const std::filesystem::path& dir, const ScenarioConfig& config, const TruthOutputs& truth);

/**
 * Run directory layout: config.json, run.log, mixture.txt,
 * parameter_sample.csv, structural_sample.csv, joint_sample.csv (not for
 * scenario A) and lambda_posterior.csv (not for scenario B).
 */
void write_run(const std::filesystem::path& dir, const ScenarioConfig& config, const RunArtifacts& artifacts);

struct LoadedRun {
  ScenarioConfig config;
  NormalMixture posterior;
};

LoadedRun load_run(const std::filesystem::path& dir);

/// posterior_parameters.csv, fields.csv, fields_natural.csv, reproductions.csv.
void write_realizations(const std::filesystem::path& dir, const ScenarioConfig& config,
                        const PosteriorRealizations& realizations);

void write_quantile_table(const std::filesystem::path& path, const std::vector<QuantileRow>& rows,
                          const std::string& key_name, const std::vector<double>& keys);

}  // namespace anchored

#endif  // ANCHORED_IO_HPP
