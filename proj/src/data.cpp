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

#include "anchored/data.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace anchored {

ErrorDist ErrorDist::diagonal_normal(VectorXd sd) {
  ErrorDist e{ErrorKind::diagonal_normal, std::move(sd)};
  e.validate(e.sd.size());
  return e;
}

void ErrorDist::validate(Index size) const {
  if (kind == ErrorKind::none) return;
  require_dims(sd.size() == size, "error standard deviations vs data length");
  if (!sd.allFinite() || (sd.array() < 0.0).any()) {
    throw std::invalid_argument("error standard deviations must be finite and nonnegative");
  }
}

VectorXd ErrorDist::draw(Index size, Rng& rng) const {
  if (kind == ErrorKind::none) return VectorXd::Zero(size);
  validate(size);
  return sd.cwiseProduct(standard_normal(size, rng));
}

MatrixXd TypeAData::functionals(const Grid1D& grid) const {
  MatrixXd h = MatrixXd::Zero(size(), grid.size());
  for (Index r = 0; r < size(); ++r) h(r, grid.index_of(locations[static_cast<std::size_t>(r)])) = 1.0;
  return h;
}

void TypeAData::validate() const {
  require_dims(static_cast<Index>(locations.size()) == values.size(), "type-A locations vs values");
  if (!values.allFinite()) throw std::invalid_argument("type-A values must be finite");
  error.validate(size());
}

void TypeBData::validate() const {
  require_dims(static_cast<Index>(indices.size()) == values.size(), "type-B indices vs values");
  if (!values.allFinite()) throw std::invalid_argument("type-B values must be finite");
  for (Index idx : indices) {
    if (idx < 0) throw std::invalid_argument("type-B index must be nonnegative");
  }
  error.validate(size());
}

VectorXd assign_typeA_anchors(const TypeAData& data, Rng& rng) {
  data.validate();
  if (data.error.kind == ErrorKind::none) return data.values;
  return data.values - data.error.draw(data.size(), rng);
}

VectorXd perturb_forward_output(const VectorXd& m, const ErrorDist& error, Rng& rng) {
  if (error.kind == ErrorKind::none) return m;
  return m + error.draw(m.size(), rng);
}

namespace {

struct Record {
  double key;
  double value;
  double sd;
  bool has_sd;
};

std::vector<Record> read_records(std::istream& in, const char* what) {
  std::vector<Record> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    Record r{};
    if (!(fields >> r.key)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw std::runtime_error(fmt::format("{} line {}: cannot parse record", what, line_no));
    }
    if (!(fields >> r.value)) throw std::runtime_error(fmt::format("{} line {}: missing value", what, line_no));
    r.has_sd = static_cast<bool>(fields >> r.sd);
    std::string extra;
    if (fields >> extra) throw std::runtime_error(fmt::format("{} line {}: trailing fields", what, line_no));
    records.push_back(r);
  }
  return records;
}

ErrorDist error_from(const std::vector<Record>& records) {
  bool any = false;
  VectorXd sd = VectorXd::Zero(static_cast<Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].has_sd) {
      any = true;
      sd(static_cast<Index>(i)) = records[i].sd;
    }
  }
  return any ? ErrorDist::diagonal_normal(std::move(sd)) : ErrorDist::none();
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

void write_sd(std::ostream& out, const ErrorDist& error, Index i) {
  if (error.kind == ErrorKind::diagonal_normal) fmt::print(out, " {:.17g}", error.sd(i));
}

}  // namespace

TypeAData read_typeA(std::istream& in) {
  const auto records = read_records(in, "type-A data");
  TypeAData data;
  data.values.resize(static_cast<Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    data.locations.push_back(records[i].key);
    data.values(static_cast<Index>(i)) = records[i].value;
  }
  data.error = error_from(records);
  data.validate();
  return data;
}

TypeAData read_typeA_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_typeA(in);
}

void write_typeA(std::ostream& out, const TypeAData& data) {
  fmt::print(out, "# location value{}\n", data.error.kind == ErrorKind::diagonal_normal ? " sd" : "");
  for (Index i = 0; i < data.size(); ++i) {
    fmt::print(out, "{:.17g} {:.17g}", data.locations[static_cast<std::size_t>(i)], data.values(i));
    write_sd(out, data.error, i);
    fmt::print(out, "\n");
  }
}

TypeBData read_typeB(std::istream& in) {
  const auto records = read_records(in, "type-B data");
  TypeBData data;
  data.values.resize(static_cast<Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    const double key = records[i].key;
    if (key != std::floor(key)) throw std::runtime_error("type-B index must be an integer");
    data.indices.push_back(static_cast<Index>(key));
    data.values(static_cast<Index>(i)) = records[i].value;
  }
  data.error = error_from(records);
  data.validate();
  return data;
}

TypeBData read_typeB_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_typeB(in);
}

void write_typeB(std::ostream& out, const TypeBData& data) {
  fmt::print(out, "# index value{}\n", data.error.kind == ErrorKind::diagonal_normal ? " sd" : "");
  for (Index i = 0; i < data.size(); ++i) {
    fmt::print(out, "{} {:.17g}", data.indices[static_cast<std::size_t>(i)], data.values(i));
    write_sd(out, data.error, i);
    fmt::print(out, "\n");
  }
}

}  // namespace anchored
