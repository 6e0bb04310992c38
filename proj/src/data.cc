// Copyright 2026 The Lomia Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lomia/data.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <nlohmann/json.hpp>

namespace lomia {
namespace {

std::vector<std::string_view> SplitCommas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string JoinNames(const Schema& schema) {
  std::string out;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (i) out += ',';
    out += schema.attribute(i).name;
  }
  return out;
}

}  // namespace

std::string_view RoleName(Role role) {
  switch (role) {
    case Role::kTarget:
      return "target";
    case Role::kSensitive:
      return "sensitive";
    case Role::kNonSensitive:
      return "non_sensitive";
  }
  return "non_sensitive";
}

Role ParseRole(std::string_view name) {
  if (name == "target") return Role::kTarget;
  if (name == "sensitive") return Role::kSensitive;
  if (name == "non_sensitive") return Role::kNonSensitive;
  throw Error(fmt::format("unknown role '{}'", name));
}

bool IsValidLabel(std::string_view label) {
  if (label.empty()) return false;
  return std::all_of(label.begin(), label.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
           (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

std::optional<Level> AttributeSpec::FindLevel(std::string_view label) const {
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] == label) return static_cast<Level>(i);
  }
  return std::nullopt;
}

Schema::Schema(std::vector<AttributeSpec> attributes)
    : attributes_(std::move(attributes)) {
  std::unordered_set<std::string> names;
  int targets = 0;
  for (const AttributeSpec& a : attributes_) {
    if (!IsValidLabel(a.name)) {
      throw Error(fmt::format("invalid attribute name '{}'", a.name));
    }
    if (a.name == "id") throw Error("'id' is reserved for the row id column");
    if (!names.insert(a.name).second) {
      throw Error(fmt::format("duplicate attribute name '{}'", a.name));
    }
    if (a.levels.empty()) {
      throw Error(fmt::format("attribute '{}' has no levels", a.name));
    }
    if (a.levels.size() >= kUnknownLevel) {
      throw Error(fmt::format("attribute '{}' has too many levels", a.name));
    }
    std::unordered_set<std::string> seen;
    for (const std::string& l : a.levels) {
      if (!IsValidLabel(l)) {
        throw Error(
            fmt::format("attribute '{}': invalid level label '{}'", a.name, l));
      }
      if (!seen.insert(l).second) {
        throw Error(
            fmt::format("attribute '{}': duplicate level '{}'", a.name, l));
      }
    }
    if (a.role == Role::kTarget) {
      ++targets;
      if (a.levels.size() != 2) {
        throw Error(fmt::format("target '{}' must be binary", a.name));
      }
    }
  }
  if (targets > 1) throw Error("schema declares more than one target");
}

std::optional<std::size_t> Schema::IndexOf(std::string_view name) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t Schema::Require(std::string_view name) const {
  auto idx = IndexOf(name);
  if (!idx) throw Error(fmt::format("unknown attribute '{}'", name));
  return *idx;
}

std::optional<std::size_t> Schema::target_index() const {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].role == Role::kTarget) return i;
  }
  return std::nullopt;
}

std::vector<std::size_t> Schema::IndicesWithRole(Role role) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].role == role) out.push_back(i);
  }
  return out;
}

std::vector<std::string> Schema::names() const {
  std::vector<std::string> out;
  out.reserve(attributes_.size());
  for (const AttributeSpec& a : attributes_) out.push_back(a.name);
  return out;
}

void Schema::ValidateStudyRoles() const {
  if (!target_index()) throw Error("schema has no target attribute");
  if (IndicesWithRole(Role::kSensitive).empty()) {
    throw Error("schema has no sensitive attribute");
  }
  if (IndicesWithRole(Role::kNonSensitive).empty()) {
    throw Error("schema has no non-sensitive attribute");
  }
}

std::string Schema::Canonical() const {
  std::string out;
  for (const AttributeSpec& a : attributes_) {
    out += a.name;
    out += ':';
    out += RoleName(a.role);
    out += ':';
    for (std::size_t i = 0; i < a.levels.size(); ++i) {
      if (i) out += ',';
      out += a.levels[i];
    }
    out += ';';
  }
  return out;
}

Dataset::Dataset(Schema schema, std::vector<std::int64_t> ids,
                 std::vector<Level> cells)
    : schema_(std::move(schema)), ids_(std::move(ids)), cells_(std::move(cells)) {
  const std::size_t m = schema_.size();
  if (cells_.size() != ids_.size() * m) {
    throw Error(fmt::format("dataset has {} cells, expected {} rows x {} columns",
                            cells_.size(), ids_.size(), m));
  }
  for (std::size_t r = 0; r < ids_.size(); ++r) {
    for (std::size_t c = 0; c < m; ++c) {
      if (cells_[r * m + c] >= schema_.attribute(c).num_levels()) {
        throw Error(fmt::format("row {} column '{}': level index {} out of range",
                                r, schema_.attribute(c).name, cells_[r * m + c]));
      }
    }
  }
  std::unordered_set<std::int64_t> seen;
  seen.reserve(ids_.size());
  for (std::int64_t id : ids_) {
    if (!seen.insert(id).second) throw Error(fmt::format("duplicate id {}", id));
  }
}

std::vector<Level> Dataset::Column(std::size_t c) const {
  std::vector<Level> out(num_rows());
  for (std::size_t r = 0; r < num_rows(); ++r) out[r] = at(r, c);
  return out;
}

std::uint64_t Dataset::Fingerprint() const {
  std::uint64_t h = Fnv1a(schema_.Canonical());
  h = Fnv1a(std::string_view(reinterpret_cast<const char*>(ids_.data()),
                             ids_.size() * sizeof(std::int64_t)),
            h);
  h = Fnv1a(std::string_view(reinterpret_cast<const char*>(cells_.data()),
                             cells_.size() * sizeof(Level)),
            h);
  return h;
}

MarginalSet::MarginalSet(Schema schema,
                         std::vector<std::vector<double>> probabilities,
                         std::uint64_t source_fingerprint)
    : schema_(std::move(schema)),
      probabilities_(std::move(probabilities)),
      source_fingerprint_(source_fingerprint) {
  if (probabilities_.size() != schema_.size()) {
    throw Error("marginal set does not cover the schema");
  }
  for (std::size_t a = 0; a < schema_.size(); ++a) {
    const auto& p = probabilities_[a];
    if (p.size() != schema_.attribute(a).num_levels()) {
      throw Error(fmt::format("marginal of '{}' has {} levels, schema has {}",
                              schema_.attribute(a).name, p.size(),
                              schema_.attribute(a).num_levels()));
    }
    double total = 0;
    for (double v : p) {
      if (!(v >= 0)) {
        throw Error(fmt::format("marginal of '{}' has a negative probability",
                                schema_.attribute(a).name));
      }
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw Error(fmt::format("marginal of '{}' sums to {}",
                              schema_.attribute(a).name, total));
    }
  }
}

const std::vector<double>& MarginalSet::of(std::string_view name) const {
  return probabilities_[schema_.Require(name)];
}

Dataset ParseCsv(std::istream& in, const Schema& schema,
                 std::string_view source_name) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(fmt::format("{}: missing header row", source_name));
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::string expected = JoinNames(schema);
  bool has_id = false;
  if (line == "id," + expected || (schema.size() == 0 && line == "id")) {
    has_id = true;
  } else if (line != expected) {
    throw Error(fmt::format("{}: header '{}' does not match schema '{}'",
                            source_name, line, expected));
  }
  const std::size_t m = schema.size();
  const std::size_t fields = m + (has_id ? 1 : 0);
  std::vector<std::int64_t> ids;
  std::vector<Level> cells;
  std::size_t row = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto parts = SplitCommas(line);
    if (parts.size() != fields) {
      throw Error(fmt::format("{}: row {} (line {}): expected {} fields, got {}",
                              source_name, row + 1, line_no, fields,
                              parts.size()));
    }
    std::size_t offset = 0;
    if (has_id) {
      std::int64_t id = 0;
      auto [p, ec] = std::from_chars(parts[0].data(),
                                     parts[0].data() + parts[0].size(), id);
      if (ec != std::errc() || p != parts[0].data() + parts[0].size()) {
        throw Error(fmt::format("{}: row {} (line {}): invalid id '{}'",
                                source_name, row + 1, line_no, parts[0]));
      }
      ids.push_back(id);
      offset = 1;
    } else {
      ids.push_back(static_cast<std::int64_t>(row));
    }
    for (std::size_t c = 0; c < m; ++c) {
      std::string_view cell = parts[c + offset];
      const AttributeSpec& attr = schema.attribute(c);
      if (cell.empty()) {
        throw Error(fmt::format("{}: row {} (line {}) column '{}': missing value",
                                source_name, row + 1, line_no, attr.name));
      }
      auto level = attr.FindLevel(cell);
      if (!level) {
        throw Error(fmt::format(
            "{}: row {} (line {}) column '{}': unknown level '{}'", source_name,
            row + 1, line_no, attr.name, cell));
      }
      cells.push_back(*level);
    }
    ++row;
  }
  return Dataset(schema, std::move(ids), std::move(cells));
}

Dataset LoadCsv(const std::string& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open '{}'", path));
  return ParseCsv(in, schema, path);
}

void WriteCsv(const Dataset& data, std::ostream& out) {
  const Schema& schema = data.schema();
  out << "id";
  for (const AttributeSpec& a : schema.attributes()) out << ',' << a.name;
  out << '\n';
  for (std::size_t r = 0; r < data.num_rows(); ++r) {
    out << data.id(r);
    for (std::size_t c = 0; c < schema.size(); ++c) {
      out << ',' << schema.attribute(c).levels[data.at(r, c)];
    }
    out << '\n';
  }
}

void WriteCsv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write '{}'", path));
  WriteCsv(data, out);
  if (!out) throw Error(fmt::format("write to '{}' failed", path));
}

MarginalSet ComputeMarginals(const Dataset& data) {
  if (data.empty()) throw Error("cannot compute marginals of an empty dataset");
  const Schema& schema = data.schema();
  std::vector<std::vector<std::size_t>> counts(schema.size());
  for (std::size_t c = 0; c < schema.size(); ++c) {
    counts[c].assign(schema.attribute(c).num_levels(), 0);
  }
  for (std::size_t r = 0; r < data.num_rows(); ++r) {
    for (std::size_t c = 0; c < schema.size(); ++c) ++counts[c][data.at(r, c)];
  }
  const double n = static_cast<double>(data.num_rows());
  std::vector<std::vector<double>> probs(schema.size());
  for (std::size_t c = 0; c < schema.size(); ++c) {
    probs[c].resize(counts[c].size());
    for (std::size_t l = 0; l < counts[c].size(); ++l) {
      probs[c][l] = static_cast<double>(counts[c][l]) / n;
    }
  }
  return MarginalSet(schema, std::move(probs), data.Fingerprint());
}

Dataset SelectRows(const Dataset& data, std::span<const std::size_t> rows) {
  const std::size_t m = data.num_columns();
  std::vector<std::int64_t> ids;
  std::vector<Level> cells;
  ids.reserve(rows.size());
  cells.reserve(rows.size() * m);
  for (std::size_t r : rows) {
    if (r >= data.num_rows()) throw Error("row index out of range");
    ids.push_back(data.id(r));
    auto src = data.row(r);
    cells.insert(cells.end(), src.begin(), src.end());
  }
  return Dataset(data.schema(), std::move(ids), std::move(cells));
}

Dataset SampleRows(const Dataset& data, std::size_t n, Seed seed) {
  if (n > data.num_rows()) {
    throw Error(fmt::format("cannot sample {} rows from {}", n, data.num_rows()));
  }
  std::vector<std::size_t> order(data.num_rows());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  order.resize(n);
  return SelectRows(data, order);
}

Dataset DropColumns(const Dataset& data, std::span<const std::string> names) {
  const Schema& schema = data.schema();
  std::vector<bool> drop(schema.size(), false);
  for (const std::string& name : names) drop[schema.Require(name)] = true;
  std::vector<std::string> keep;
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (!drop[c]) keep.push_back(schema.attribute(c).name);
  }
  std::vector<AttributeSpec> attrs;
  for (const std::string& k : keep) attrs.push_back(schema.attribute(schema.Require(k)));
  return ProjectToSchema(data, Schema(std::move(attrs)));
}

Dataset ProjectToSchema(const Dataset& data, const Schema& schema) {
  std::vector<std::size_t> source(schema.size());
  for (std::size_t c = 0; c < schema.size(); ++c) {
    const AttributeSpec& want = schema.attribute(c);
    source[c] = data.schema().Require(want.name);
    if (data.schema().attribute(source[c]).levels != want.levels) {
      throw Error(fmt::format("attribute '{}' has different levels", want.name));
    }
  }
  std::vector<Level> cells;
  cells.reserve(data.num_rows() * schema.size());
  for (std::size_t r = 0; r < data.num_rows(); ++r) {
    for (std::size_t c = 0; c < schema.size(); ++c) {
      cells.push_back(data.at(r, source[c]));
    }
  }
  return Dataset(schema, data.ids(), std::move(cells));
}

Dataset ConcatRows(const Dataset& a, const Dataset& b) {
  if (!(a.schema() == b.schema())) throw Error("cannot concatenate: schemas differ");
  std::vector<std::int64_t> ids = a.ids();
  ids.insert(ids.end(), b.ids().begin(), b.ids().end());
  std::vector<Level> cells = a.cells();
  cells.insert(cells.end(), b.cells().begin(), b.cells().end());
  return Dataset(a.schema(), std::move(ids), std::move(cells));
}

double TvDistance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error("TV distance: size mismatch");
  double total = 0;
  for (std::size_t i = 0; i < p.size(); ++i) total += std::abs(p[i] - q[i]);
  return 0.5 * total;
}

Schema ParseSchemaConfig(std::string_view yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    throw Error(fmt::format("schema config: {}", e.what()));
  }
  const YAML::Node list = root["attributes"];
  if (!list || !list.IsSequence()) {
    throw Error("schema config: missing 'attributes' list");
  }
  std::vector<AttributeSpec> attrs;
  for (const YAML::Node& node : list) {
    AttributeSpec a;
    try {
      a.name = node["name"].as<std::string>();
      a.role = ParseRole(node["role"] ? node["role"].as<std::string>()
                                      : std::string("non_sensitive"));
      a.levels = node["levels"].as<std::vector<std::string>>();
    } catch (const YAML::Exception& e) {
      throw Error(fmt::format("schema config: {}", e.what()));
    }
    attrs.push_back(std::move(a));
  }
  return Schema(std::move(attrs));
}

Schema LoadSchemaConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseSchemaConfig(ss.str());
}

std::string SchemaConfigYaml(const Schema& schema) {
  YAML::Emitter out;
  out << YAML::BeginMap << YAML::Key << "attributes" << YAML::Value
      << YAML::BeginSeq;
  for (const AttributeSpec& a : schema.attributes()) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << a.name;
    out << YAML::Key << "role" << YAML::Value << std::string(RoleName(a.role));
    out << YAML::Key << "levels" << YAML::Value << YAML::Flow << a.levels;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

void SaveMarginals(const MarginalSet& marginals, const std::string& path) {
  nlohmann::ordered_json j;
  j["format"] = "lomia-marginals";
  j["version"] = 1;
  j["source_fingerprint"] = HexU64(marginals.source_fingerprint());
  j["attributes"] = nlohmann::ordered_json::array();
  const Schema& schema = marginals.schema();
  for (std::size_t a = 0; a < schema.size(); ++a) {
    nlohmann::ordered_json e;
    e["name"] = schema.attribute(a).name;
    e["role"] = RoleName(schema.attribute(a).role);
    e["levels"] = schema.attribute(a).levels;
    e["probabilities"] = marginals.of(a);
    j["attributes"].push_back(std::move(e));
  }
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write '{}'", path));
  out << j.dump(2) << '\n';
}

MarginalSet LoadMarginals(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open '{}'", path));
  try {
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.at("format") != "lomia-marginals" || j.at("version") != 1) {
      throw Error(fmt::format("'{}' is not a version-1 marginals file", path));
    }
    std::vector<AttributeSpec> attrs;
    std::vector<std::vector<double>> probs;
    for (const auto& e : j.at("attributes")) {
      attrs.push_back({e.at("name").get<std::string>(),
                       e.at("levels").get<std::vector<std::string>>(),
                       ParseRole(e.at("role").get<std::string>())});
      probs.push_back(e.at("probabilities").get<std::vector<double>>());
    }
    std::uint64_t fp = std::stoull(j.at("source_fingerprint").get<std::string>(),
                                   nullptr, 16);
    return MarginalSet(Schema(std::move(attrs)), std::move(probs), fp);
  } catch (const nlohmann::json::exception& e) {
    throw Error(fmt::format("'{}': {}", path, e.what()));
  }
}

}  // namespace lomia
