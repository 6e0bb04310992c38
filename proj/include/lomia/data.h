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

// Categorical tables: schema, dataset container, CSV I/O, marginals and
// reproducible row sampling.
//
// Every attribute is categorical. Cells are stored as level indices into the
// attribute's ordered level list; row-major.

#ifndef LOMIA_DATA_H_
#define LOMIA_DATA_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lomia/common.h"

namespace lomia {

enum class Role { kTarget, kSensitive, kNonSensitive };

std::string_view RoleName(Role role);
Role ParseRole(std::string_view name);

// Level labels and attribute names are restricted to [A-Za-z0-9_-] so the
// canonical CSV never needs quoting.
bool IsValidLabel(std::string_view label);

struct AttributeSpec {
  std::string name;
  std::vector<std::string> levels;
  Role role = Role::kNonSensitive;

  std::size_t num_levels() const { return levels.size(); }
  std::optional<Level> FindLevel(std::string_view label) const;

  bool operator==(const AttributeSpec&) const = default;
};

class Schema {
 public:
  Schema() = default;
  // Validates unique names, unique non-empty labels, at most one target and
  // that a target, when present, is binary.
  explicit Schema(std::vector<AttributeSpec> attributes);

  std::size_t size() const { return attributes_.size(); }
  const AttributeSpec& attribute(std::size_t i) const { return attributes_[i]; }
  const std::vector<AttributeSpec>& attributes() const { return attributes_; }

  std::optional<std::size_t> IndexOf(std::string_view name) const;
  // Like IndexOf but throws Error for unknown names.
  std::size_t Require(std::string_view name) const;

  std::optional<std::size_t> target_index() const;
  std::vector<std::size_t> IndicesWithRole(Role role) const;
  std::vector<std::string> names() const;

  // Full study schema: exactly one binary target, at least one sensitive and
  // one non-sensitive attribute. Derived views (attacker view, projections)
  // are not required to satisfy this.
  void ValidateStudyRoles() const;

  // "name:role:l1,l2,...;" per attribute. Stable across versions.
  std::string Canonical() const;
  std::uint64_t Hash() const { return Fnv1a(Canonical()); }

  bool operator==(const Schema&) const = default;

 private:
  std::vector<AttributeSpec> attributes_;
};

// Immutable categorical table with a stable id per row.
class Dataset {
 public:
  Dataset() = default;
  // `cells` is row-major with schema.size() columns. Throws Error if a cell
  // is outside its level set or ids are duplicated.
  Dataset(Schema schema, std::vector<std::int64_t> ids,
          std::vector<Level> cells);

  const Schema& schema() const { return schema_; }
  std::size_t num_rows() const { return ids_.size(); }
  std::size_t num_columns() const { return schema_.size(); }
  bool empty() const { return ids_.empty(); }

  std::int64_t id(std::size_t row) const { return ids_[row]; }
  const std::vector<std::int64_t>& ids() const { return ids_; }
  std::span<const Level> row(std::size_t r) const {
    return {cells_.data() + r * num_columns(), num_columns()};
  }
  Level at(std::size_t r, std::size_t c) const {
    return cells_[r * num_columns() + c];
  }
  const std::vector<Level>& cells() const { return cells_; }
  std::vector<Level> Column(std::size_t c) const;

  // Hash over schema, ids and cells; identifies "the dataset a model was
  // trained on" when releasing artifacts.
  std::uint64_t Fingerprint() const;

  bool operator==(const Dataset&) const = default;

 private:
  Schema schema_;
  std::vector<std::int64_t> ids_;
  std::vector<Level> cells_;
};

// Per-attribute level -> probability maps, tagged with the fingerprint of the
// dataset they were computed from.
class MarginalSet {
 public:
  MarginalSet() = default;
  MarginalSet(Schema schema, std::vector<std::vector<double>> probabilities,
              std::uint64_t source_fingerprint);

  const Schema& schema() const { return schema_; }
  const std::vector<double>& of(std::size_t attribute) const {
    return probabilities_[attribute];
  }
  const std::vector<double>& of(std::string_view name) const;
  std::uint64_t source_fingerprint() const { return source_fingerprint_; }

  bool operator==(const MarginalSet&) const = default;

 private:
  Schema schema_;
  std::vector<std::vector<double>> probabilities_;
  std::uint64_t source_fingerprint_ = 0;
};

// CSV header is either exactly the schema names, or "id" followed by them.
// Without an id column rows get ids 0..n-1.
Dataset ParseCsv(std::istream& in, const Schema& schema,
                 std::string_view source_name = "<stream>");
Dataset LoadCsv(const std::string& path, const Schema& schema);
// Canonical form: "id,<names>" header, comma separated, "\n" line endings.
void WriteCsv(const Dataset& data, std::ostream& out);
void WriteCsv(const Dataset& data, const std::string& path);

MarginalSet ComputeMarginals(const Dataset& data);

// Uniform sample of n rows without replacement (partial Fisher-Yates), in
// draw order. Deterministic for a fixed seed.
Dataset SampleRows(const Dataset& data, std::size_t n, Seed seed);

Dataset SelectRows(const Dataset& data, std::span<const std::size_t> rows);
Dataset DropColumns(const Dataset& data, std::span<const std::string> names);
// Reorders/selects columns by name to match `schema`; level lists must agree.
Dataset ProjectToSchema(const Dataset& data, const Schema& schema);
// Rows of `a` followed by rows of `b`; schemas must match.
Dataset ConcatRows(const Dataset& a, const Dataset& b);

// Total variation distance 0.5 * sum |p - q|.
double TvDistance(std::span<const double> p, std::span<const double> q);

// Declarative schema config (YAML):
//
//   attributes:
//     - name: gender
//       role: sensitive          # target | sensitive | non_sensitive
//       levels: [F, M]
//
// Extra keys (parents, table, persistence) are read by the surrogate
// generator and ignored here.
Schema LoadSchemaConfig(const std::string& path);
Schema ParseSchemaConfig(std::string_view yaml_text);
std::string SchemaConfigYaml(const Schema& schema);

// JSON: {"format":"lomia-marginals","version":1,"source_fingerprint":...,
//        "attributes":[{"name","role","levels","probabilities"}]}
void SaveMarginals(const MarginalSet& marginals, const std::string& path);
MarginalSet LoadMarginals(const std::string& path);

}  // namespace lomia

#endif  // LOMIA_DATA_H_
