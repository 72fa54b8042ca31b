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

#include "anchored/config.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

namespace anchored {

using nlohmann::json;

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::a_only: return "A";
    case ScenarioKind::ab: return "AB";
    case ScenarioKind::b_only: return "B";
  }
  return "AB";
}

ScenarioKind scenario_kind_from_string(const std::string& name) {
  if (name == "A") return ScenarioKind::a_only;
  if (name == "AB") return ScenarioKind::ab;
  if (name == "B") return ScenarioKind::b_only;
  throw std::invalid_argument("scenario must be one of A, AB, B; got '" + name + "'");
}

void BoundedStructuralPrior::validate() const {
  if (!(beta_lower < beta_upper)) throw std::invalid_argument("bounded prior needs beta_lower < beta_upper");
  if (!(eta2_lower > 0.0 && eta2_lower < eta2_upper)) {
    throw std::invalid_argument("bounded prior needs 0 < eta2_lower < eta2_upper");
  }
}

void ScenarioConfig::validate() const {
  prior.validate();
  if (diffusion.has_value() == external.has_value()) {
    throw std::invalid_argument("exactly one of forward.processes or forward.external must be given");
  }
  if (diffusion) diffusion->validate(grid.size());
  if (sample_size < 1) throw std::invalid_argument("sample_size must be positive");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  if (posterior_draws < 0) throw std::invalid_argument("posterior_draws must be nonnegative");
  if (kind != ScenarioKind::a_only && sample_size < neighbors + 1) {
    throw std::invalid_argument("sample_size must be at least neighbors + 1");
  }
  if (kind == ScenarioKind::b_only && !bounded_prior) {
    throw std::invalid_argument("scenario B needs a bounded_prior for the structural parameters");
  }
  if (bounded_prior) bounded_prior->validate();
  if (kind != ScenarioKind::b_only && !type_a) throw std::invalid_argument("scenarios A and AB need type-A data");
  if (kind != ScenarioKind::a_only && !type_b) throw std::invalid_argument("scenarios AB and B need type-B data");
  // Distinct anchor locations.
  std::vector<double> all = anchor_locations;
  if (type_a && kind != ScenarioKind::b_only) all.insert(all.end(), type_a->locations.begin(), type_a->locations.end());
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw std::invalid_argument("anchor and type-A locations must be distinct");
  }
}

namespace {

Transform<double> parse_transform(const json& j) {
  const auto kind = transform_kind_from_string(j.at("kind").get<std::string>());
  switch (kind) {
    case TransformKind::identity: return Transform<double>::identity();
    case TransformKind::log: return Transform<double>::log();
    case TransformKind::logit: return Transform<double>::logit(j.at("lower").get<double>(), j.at("upper").get<double>());
  }
  return Transform<double>::identity();
}

json transform_json(const Transform<double>& t) {
  json j{{"kind", to_string(t.kind)}};
  if (t.kind == TransformKind::logit) {
    j["lower"] = t.lower;
    j["upper"] = t.upper;
  }
  return j;
}

VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Index>(v.size()));
}

std::vector<double> to_std(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

ErrorDist parse_error(const json& j, Index size) {
  if (!j.contains("sd")) return ErrorDist::none();
  const auto sd = j.at("sd").get<std::vector<double>>();
  require_dims(static_cast<Index>(sd.size()) == size, "data sd vs values");
  return ErrorDist::diagonal_normal(to_vector(sd));
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

TypeAData parse_typeA(const json& j, const std::filesystem::path& base) {
  if (j.is_string()) return read_typeA_file(resolve(base, j.get<std::string>()));
  TypeAData d;
  d.locations = j.at("locations").get<std::vector<double>>();
  d.values = to_vector(j.at("values").get<std::vector<double>>());
  d.error = parse_error(j, d.values.size());
  d.validate();
  return d;
}

TypeBData parse_typeB(const json& j, const std::filesystem::path& base) {
  if (j.is_string()) return read_typeB_file(resolve(base, j.get<std::string>()));
  TypeBData d;
  d.indices = j.at("indices").get<std::vector<Index>>();
  d.values = to_vector(j.at("values").get<std::vector<double>>());
  d.error = parse_error(j, d.values.size());
  d.validate();
  return d;
}

json error_json(json j, const ErrorDist& e) {
  if (e.kind == ErrorKind::diagonal_normal) j["sd"] = to_std(e.sd);
  return j;
}

ForwardSpec parse_processes(const json& j, const Grid1D& grid) {
  ForwardSpec spec;
  for (const auto& p : j) {
    ForwardProcess proc;
    proc.source = VectorXd::Zero(grid.size());
    if (p.contains("sources")) {
      for (const auto& s : p.at("sources")) {
        proc.source(grid.index_of(s.at(0).get<double>())) += s.at(1).get<double>();
      }
    }
    proc.z_left = p.at("left").get<double>();
    proc.z_right = p.at("right").get<double>();
    for (double loc : p.at("observations").get<std::vector<double>>()) proc.observations.push_back(grid.index_of(loc));
    spec.processes.push_back(std::move(proc));
  }
  spec.validate(grid.size());
  return spec;
}

}  // namespace

ScenarioConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  ScenarioConfig c;
  const auto& g = j.at("grid");
  c.grid = Grid1D::uniform(g.at("count").get<Index>(), g.value("start", 1.0), g.value("spacing", 1.0));
  if (j.contains("field_transform")) c.field_transform = parse_transform(j.at("field_transform"));

  const auto& p = j.at("prior");
  c.prior.a = p.value("a", 1.0);
  c.prior.lambda_lower = p.value("lambda_lower", 0.05 * c.grid.domain_length());
  c.prior.lambda_upper = p.value("lambda_upper", c.grid.domain_length());
  c.prior.lambda_grid_size = p.value("lambda_grid_size", 200);
  c.prior.validate();

  c.typeA_locations = j.value("typeA_locations", std::vector<double>{});
  c.anchor_locations = j.value("anchor_locations", std::vector<double>{});
  if (j.contains("data")) {
    const auto& d = j.at("data");
    if (d.contains("typeA")) c.type_a = parse_typeA(d.at("typeA"), base_dir);
    if (d.contains("typeB")) c.type_b = parse_typeB(d.at("typeB"), base_dir);
  }

  const auto& f = j.at("forward");
  if (f.contains("processes")) c.diffusion = parse_processes(f.at("processes"), c.grid);
  if (f.contains("external")) {
    const auto& e = f.at("external");
    c.external = ExternalForwardSettings{e.at("command").get<std::string>(), e.at("output_size").get<Index>()};
  }

  c.transforms.lambda = Transform<double>::logit(c.prior.lambda_lower, c.prior.lambda_upper);
  if (j.contains("transforms")) {
    const auto& t = j.at("transforms");
    if (t.contains("lambda")) c.transforms.lambda = parse_transform(t.at("lambda"));
    if (t.contains("eta2")) c.transforms.eta2 = parse_transform(t.at("eta2"));
    if (t.contains("beta")) c.transforms.beta = parse_transform(t.at("beta"));
    if (t.contains("anchors")) c.transforms.anchors = parse_transform(t.at("anchors"));
    if (t.contains("output")) c.transforms.output = parse_transform(t.at("output"));
  }

  c.kind = scenario_kind_from_string(j.value("scenario", std::string("AB")));
  c.sample_size = j.value("sample_size", Index{5000});
  c.neighbors = j.value("neighbors", Index{500});
  c.bandwidth = j.value("bandwidth", 1.0);
  c.seed = j.value("seed", std::uint64_t{1});
  c.workers = j.value("workers", 0);
  c.posterior_draws = j.value("posterior_draws", Index{1000});
  c.max_failure_fraction = j.value("max_failure_fraction", 0.1);
  c.ess_warning = j.value("ess_warning", 50.0);
  if (j.contains("bounded_prior")) {
    const auto& b = j.at("bounded_prior");
    c.bounded_prior = BoundedStructuralPrior{b.at("beta_lower").get<double>(), b.at("beta_upper").get<double>(),
                                             b.at("eta2_lower").get<double>(), b.at("eta2_upper").get<double>()};
  }
  if (j.contains("truth")) {
    const auto& t = j.at("truth");
    if (t.contains("profile")) c.truth.profile = resolve(base_dir, t.at("profile").get<std::string>());
    c.truth.typeA_sd = t.value("typeA_sd", 0.0);
    c.truth.typeB_sd = t.value("typeB_sd", 0.0);
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error(fmt::format("config {}: {}", path.string(), e.what()));
  }
  return parse_config(j, path.parent_path());
}

json to_json(const ScenarioConfig& c) {
  const auto& loc = c.grid.locations();
  json j;
  j["grid"] = {{"count", c.grid.size()}, {"start", loc(0)}, {"spacing", loc(1) - loc(0)}};
  j["field_transform"] = transform_json(c.field_transform);
  j["prior"] = {{"a", c.prior.a},
                {"lambda_lower", c.prior.lambda_lower},
                {"lambda_upper", c.prior.lambda_upper},
                {"lambda_grid_size", c.prior.lambda_grid_size}};
  j["typeA_locations"] = c.typeA_locations;
  j["anchor_locations"] = c.anchor_locations;
  json data = json::object();
  if (c.type_a) {
    data["typeA"] = error_json({{"locations", c.type_a->locations}, {"values", to_std(c.type_a->values)}}, c.type_a->error);
  }
  if (c.type_b) {
    data["typeB"] = error_json({{"indices", c.type_b->indices}, {"values", to_std(c.type_b->values)}}, c.type_b->error);
  }
  j["data"] = data;
  if (c.diffusion) {
    json processes = json::array();
    for (const auto& p : c.diffusion->processes) {
      json sources = json::array();
      for (Index i = 0; i < p.source.size(); ++i) {
        if (p.source(i) != 0.0) sources.push_back({loc(i), p.source(i)});
      }
      std::vector<double> obs;
      for (Index idx : p.observations) obs.push_back(loc(idx));
      processes.push_back({{"left", p.z_left}, {"right", p.z_right}, {"sources", sources}, {"observations", obs}});
    }
    j["forward"] = {{"processes", processes}};
  } else if (c.external) {
    j["forward"] = {{"external", {{"command", c.external->command}, {"output_size", c.external->output_size}}}};
  }
  j["transforms"] = {{"lambda", transform_json(c.transforms.lambda)},
                     {"eta2", transform_json(c.transforms.eta2)},
                     {"beta", transform_json(c.transforms.beta)},
                     {"anchors", transform_json(c.transforms.anchors)},
                     {"output", transform_json(c.transforms.output)}};
  j["scenario"] = to_string(c.kind);
  j["sample_size"] = c.sample_size;
  j["neighbors"] = c.neighbors;
  j["bandwidth"] = c.bandwidth;
  j["seed"] = c.seed;
  j["posterior_draws"] = c.posterior_draws;
  j["max_failure_fraction"] = c.max_failure_fraction;
  j["ess_warning"] = c.ess_warning;
  if (c.bounded_prior) {
    j["bounded_prior"] = {{"beta_lower", c.bounded_prior->beta_lower},
                          {"beta_upper", c.bounded_prior->beta_upper},
                          {"eta2_lower", c.bounded_prior->eta2_lower},
                          {"eta2_upper", c.bounded_prior->eta2_upper}};
  }
  j["truth"] = {{"typeA_sd", c.truth.typeA_sd}, {"typeB_sd", c.truth.typeB_sd}};
  if (!c.truth.profile.empty()) j["truth"]["profile"] = std::filesystem::absolute(c.truth.profile).string();
  return j;
}

std::unique_ptr<ForwardModel> make_forward(const ScenarioConfig& config) {
  if (config.diffusion) return std::make_unique<DiffusionForward>(*config.diffusion, config.grid.size());
  if (config.external) return std::make_unique<ExternalForward>(config.external->command, config.external->output_size);
  throw std::invalid_argument("config has no forward model");
}

}  // namespace anchored
