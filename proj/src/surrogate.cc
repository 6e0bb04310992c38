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

#include "lomia/surrogate.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace lomia {
namespace {

std::size_t NumCombinations(const Schema& schema,
                            const std::vector<std::size_t>& parents) {
  std::size_t n = 1;
  for (std::size_t p : parents) n *= schema.attribute(p).num_levels();
  return n;
}

std::vector<Level> DecodeCombination(const Schema& schema,
                                     const std::vector<std::size_t>& parents,
                                     std::size_t combo) {
  std::vector<Level> levels(parents.size());
  for (std::size_t i = parents.size(); i-- > 0;) {
    const std::size_t k = schema.attribute(parents[i]).num_levels();
    levels[i] = static_cast<Level>(combo % k);
    combo /= k;
  }
  return levels;
}

// Attribute value drawn from its conditional, written into `record`.
void DrawInto(const GeneratorSpec& spec, std::size_t attribute,
              std::span<Level> record, Rng& rng) {
  record[attribute] = static_cast<Level>(
      SampleCategorical(spec.Conditional(attribute, record), rng));
}

}  // namespace

GeneratorSpec::GeneratorSpec(Schema schema, std::vector<std::size_t> order,
                             std::vector<ConditionalTable> tables)
    : schema_(std::move(schema)),
      order_(std::move(order)),
      tables_(std::move(tables)) {
  const std::size_t m = schema_.size();
  if (order_.size() != m || tables_.size() != m) {
    throw Error("generator spec: order and tables must cover every attribute");
  }
  std::vector<int> position(m, -1);
  for (std::size_t i = 0; i < m; ++i) {
    if (order_[i] >= m || position[order_[i]] != -1) {
      throw Error("generator spec: dependency order is not a permutation");
    }
    position[order_[i]] = static_cast<int>(i);
  }
  for (std::size_t a = 0; a < m; ++a) {
    const ConditionalTable& t = tables_[a];
    const AttributeSpec& attr = schema_.attribute(a);
    if (t.parents.size() > kMaxParents) {
      throw Error(fmt::format("'{}' has more than {} parents", attr.name,
                              kMaxParents));
    }
    for (std::size_t p : t.parents) {
      if (p >= m || position[p] >= position[a]) {
        throw Error(fmt::format(
            "'{}': parent does not precede it in the dependency order",
            attr.name));
      }
    }
    const std::size_t combos = NumCombinations(schema_, t.parents);
    if (t.rows.size() != combos) {
      throw Error(fmt::format(
          "'{}': conditional table has {} rows, {} parent combinations",
          attr.name, t.rows.size(), combos));
    }
    for (const auto& row : t.rows) {
      if (row.size() != attr.num_levels()) {
        throw Error(fmt::format("'{}': conditional row has {} entries, want {}",
                                attr.name, row.size(), attr.num_levels()));
      }
      double total = 0;
      for (double v : row) {
        if (!(v >= 0)) {
          throw Error(fmt::format("'{}': negative probability", attr.name));
        }
        total += v;
      }
      if (std::abs(total - 1.0) > 1e-9) {
        throw Error(fmt::format("'{}': conditional row sums to {}", attr.name,
                                total));
      }
    }
  }
  if (auto target = schema_.target_index()) {
    std::vector<bool> ancestor(m, false);
    std::vector<std::size_t> stack(tables_[*target].parents);
    while (!stack.empty()) {
      std::size_t a = stack.back();
      stack.pop_back();
      if (ancestor[a]) continue;
      ancestor[a] = true;
      for (std::size_t p : tables_[a].parents) stack.push_back(p);
    }
    int non_sensitive = 0;
    int sensitive = 0;
    for (std::size_t a = 0; a < m; ++a) {
      if (!ancestor[a]) continue;
      if (schema_.attribute(a).role == Role::kNonSensitive) ++non_sensitive;
      if (schema_.attribute(a).role == Role::kSensitive) ++sensitive;
    }
    if (non_sensitive < 2 || sensitive < 1) {
      throw Error(
          "generator spec: target must depend on >= 2 non-sensitive and >= 1 "
          "sensitive attributes");
    }
  }
}

std::span<const double> GeneratorSpec::Conditional(
    std::size_t attribute, std::span<const Level> record) const {
  const ConditionalTable& t = tables_[attribute];
  std::size_t combo = 0;
  for (std::size_t p : t.parents) {
    combo = combo * schema_.attribute(p).num_levels() + record[p];
  }
  return t.rows[combo];
}

void DriftSpec::Validate(const Schema& schema) const {
  if (persistence.size() != schema.size()) {
    throw Error("drift spec must give a persistence for every attribute");
  }
  for (std::size_t a = 0; a < persistence.size(); ++a) {
    if (!(persistence[a] >= 0 && persistence[a] <= 1)) {
      throw Error(fmt::format("persistence of '{}' must be in [0, 1]",
                              schema.attribute(a).name));
    }
  }
}

Dataset GeneratePopulation(const GeneratorSpec& spec, std::size_t n, Seed seed,
                           std::int64_t first_id) {
  if (n == 0) throw Error("population size must be >= 1");
  const std::size_t m = spec.schema().size();
  std::vector<Level> cells(n * m);
  std::vector<std::int64_t> ids(n);
  ParallelFor(n, [&](std::size_t r) {
    Rng rng(DeriveSeed(seed, r));
    std::span<Level> record(cells.data() + r * m, m);
    for (std::size_t a : spec.order()) DrawInto(spec, a, record, rng);
    ids[r] = first_id + static_cast<std::int64_t>(r);
  });
  return Dataset(spec.schema(), std::move(ids), std::move(cells));
}

Dataset ApplyTemporalDrift(const Dataset& data, const GeneratorSpec& spec,
                           const DriftSpec& drift, Seed seed) {
  if (!(data.schema() == spec.schema())) {
    throw Error("drift: dataset schema does not match the generator spec");
  }
  drift.Validate(spec.schema());
  const std::size_t m = spec.schema().size();
  std::vector<Level> cells = data.cells();
  ParallelFor(data.num_rows(), [&](std::size_t r) {
    Rng rng(DeriveSeed(seed, static_cast<std::uint64_t>(data.id(r))));
    std::span<Level> record(cells.data() + r * m, m);
    for (std::size_t a : spec.order()) {
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      if (u >= drift.persistence[a]) DrawInto(spec, a, record, rng);
    }
  });
  return Dataset(data.schema(), data.ids(), std::move(cells));
}

SplitBundle MakeStudySplits(const GeneratorSpec& spec, const DriftSpec& drift,
                            std::size_t n_train, std::size_t n_exclusive,
                            Seed seed) {
  if (n_train == 0 || n_exclusive == 0) {
    throw Error("split sizes must be >= 1");
  }
  SplitBundle bundle;
  bundle.inclusive_2013 =
      GeneratePopulation(spec, n_train, DeriveSeed(seed, "inclusive"), 0);
  bundle.inclusive_2015 = ApplyTemporalDrift(bundle.inclusive_2013, spec, drift,
                                             DeriveSeed(seed, "drift"));
  bundle.exclusive_2015 =
      GeneratePopulation(spec, n_exclusive, DeriveSeed(seed, "exclusive"),
                         static_cast<std::int64_t>(n_train));
  return bundle;
}

namespace {

// Ordinal-affinity conditional: P(c | parents) is proportional to
// base[c] * exp(-sum_j s_j * (u_c - v_j)^2), where u_c and v_j are the child
// and parent level positions scaled to [0, 1]. A negative strength reverses
// the parent's scale. For a binary child this is a logistic model that is
// linear in the parent positions.
struct Influence {
  std::string parent;
  double strength;
};

struct AttributeRecipe {
  std::string name;
  Role role;
  std::vector<std::string> levels;
  std::vector<double> base;
  std::vector<Influence> influences;
  double persistence;
};

double Position(std::size_t index, std::size_t count) {
  return count <= 1 ? 0.0 : static_cast<double>(index) / (count - 1);
}

std::vector<AttributeRecipe> DefaultRecipes() {
  const Role kS = Role::kSensitive;
  const Role kN = Role::kNonSensitive;
  return {
      {"gender", kS, {"F", "M"}, {0.5, 0.5}, {}, 1.0},
      {"age", kS, {"a18_29", "a30_39", "a40_49", "a50_64", "a65p"},
       {0.2, 0.2, 0.2, 0.2, 0.2}, {}, 0.9},
      {"income", kS, {"q1", "q2", "q3", "q4", "q5"},
       {0.2, 0.2, 0.2, 0.2, 0.2}, {}, 0.9},
      {"education", kN, {"low", "mid", "high"}, {0.3, 0.4, 0.3},
       {{"income", 3.0}, {"age", -1.5}}, 0.9},
      {"employment", kN, {"student", "employed", "unemployed", "retired"},
       {0.15, 0.55, 0.1, 0.2}, {{"age", 5.0}}, 0.9},
      {"marital", kN, {"single", "married", "divorced"}, {0.35, 0.5, 0.15},
       {{"age", 4.0}, {"gender", 0.8}}, 0.9},
      {"household_size", kN, {"h1", "h2", "h3", "h4p"}, {0.3, 0.3, 0.2, 0.2},
       {{"marital", 3.0}, {"age", -1.0}}, 0.9},
      {"health", kN, {"good", "fair", "poor"}, {0.6, 0.3, 0.1},
       {{"age", 2.5}, {"income", -1.5}}, 0.9},
      {"tenure", kN, {"rent_social", "rent_private", "own"},
       {0.3, 0.25, 0.45}, {{"income", 3.0}, {"age", 1.5}}, 0.7},
      {"dwelling", kN, {"apartment", "terraced", "detached"},
       {0.4, 0.35, 0.25}, {{"tenure", 3.0}}, 0.7},
      {"rooms", kN, {"r1_2", "r3", "r4", "r5p"}, {0.25, 0.25, 0.25, 0.25},
       {{"household_size", 2.5}, {"dwelling", 2.5}}, 0.7},
      {"region", kN, {"north", "east", "south", "west"},
       {0.2, 0.25, 0.3, 0.25}, {}, 0.7},
      {"urbanity", kN, {"u1", "u2", "u3", "u4", "u5"},
       {0.2, 0.2, 0.2, 0.2, 0.2}, {{"region", 1.0}}, 0.7},
      {"years_at_address", kN, {"y0_2", "y3_5", "y6_10", "y11p"},
       {0.25, 0.25, 0.25, 0.25}, {{"age", 3.0}, {"tenure", 2.0}}, 0.7},
      {"car_owner", kN, {"no", "yes"}, {0.4, 0.6},
       {{"income", 2.0}, {"urbanity", 1.5}}, 0.7},
      {"moved", Role::kTarget, {"0", "1"}, {0.89, 0.11},
       {{"years_at_address", -2.5}, {"age", -1.5}}, 0.5},
  };
}

}  // namespace

GeneratorSpec DefaultGeneratorSpec() {
  const std::vector<AttributeRecipe> recipes = DefaultRecipes();
  std::vector<AttributeSpec> attrs;
  for (const AttributeRecipe& r : recipes) attrs.push_back({r.name, r.levels, r.role});
  Schema schema(std::move(attrs));
  std::vector<std::size_t> order(schema.size());
  std::vector<ConditionalTable> tables(schema.size());
  for (std::size_t a = 0; a < recipes.size(); ++a) {
    order[a] = a;
    const AttributeRecipe& r = recipes[a];
    ConditionalTable& t = tables[a];
    for (const Influence& inf : r.influences) t.parents.push_back(schema.Require(inf.parent));
    const std::size_t combos = NumCombinations(schema, t.parents);
    const std::size_t k = r.levels.size();
    for (std::size_t combo = 0; combo < combos; ++combo) {
      const std::vector<Level> given = DecodeCombination(schema, t.parents, combo);
      std::vector<double> row(k);
      double total = 0;
      for (std::size_t c = 0; c < k; ++c) {
        double energy = 0;
        for (std::size_t j = 0; j < given.size(); ++j) {
          const double s = r.influences[j].strength;
          double v = Position(given[j], schema.attribute(t.parents[j]).num_levels());
          if (s < 0) v = 1.0 - v;
          const double d = Position(c, k) - v;
          energy += std::abs(s) * d * d;
        }
        row[c] = r.base[c] * std::exp(-energy);
        total += row[c];
      }
      for (double& v : row) v /= total;
      t.rows.push_back(std::move(row));
    }
  }
  return GeneratorSpec(std::move(schema), std::move(order), std::move(tables));
}

DriftSpec DefaultDriftSpec(const GeneratorSpec& spec) {
  const std::vector<AttributeRecipe> recipes = DefaultRecipes();
  DriftSpec drift;
  for (const AttributeSpec& a : spec.schema().attributes()) {
    double p = 1.0;
    for (const AttributeRecipe& r : recipes) {
      if (r.name == a.name) p = r.persistence;
    }
    drift.persistence.push_back(p);
  }
  return drift;
}

GeneratorConfig ParseGeneratorConfig(std::string_view yaml_text) {
  Schema schema = ParseSchemaConfig(yaml_text);
  YAML::Node root = YAML::Load(std::string(yaml_text));
  const YAML::Node list = root["attributes"];
  const std::size_t m = schema.size();
  std::vector<std::size_t> order(m);
  std::vector<ConditionalTable> tables(m);
  DriftSpec drift;
  drift.persistence.assign(m, 1.0);
  try {
    for (std::size_t a = 0; a < m; ++a) {
      order[a] = a;
      const YAML::Node node = list[a];
      const AttributeSpec& attr = schema.attribute(a);
      ConditionalTable& t = tables[a];
      if (node["parents"]) {
        for (const auto& p : node["parents"].as<std::vector<std::string>>()) {
          t.parents.push_back(schema.Require(p));
        }
      }
      if (node["persistence"]) drift.persistence[a] = node["persistence"].as<double>();
      const std::size_t combos = NumCombinations(schema, t.parents);
      t.rows.assign(combos, {});
      std::vector<bool> seen(combos, false);
      if (!node["table"] || !node["table"].IsSequence()) {
        throw Error(fmt::format("'{}': missing conditional table", attr.name));
      }
      for (const YAML::Node& entry : node["table"]) {
        std::vector<std::string> given;
        if (entry["given"]) given = entry["given"].as<std::vector<std::string>>();
        if (given.size() != t.parents.size()) {
          throw Error(fmt::format("'{}': table entry names {} parent levels, want {}",
                                  attr.name, given.size(), t.parents.size()));
        }
        std::size_t combo = 0;
        for (std::size_t j = 0; j < given.size(); ++j) {
          const AttributeSpec& parent = schema.attribute(t.parents[j]);
          auto level = parent.FindLevel(given[j]);
          if (!level) {
            throw Error(fmt::format("'{}': unknown level '{}' of parent '{}'",
                                    attr.name, given[j], parent.name));
          }
          combo = combo * parent.num_levels() + *level;
        }
        if (seen[combo]) {
          throw Error(fmt::format("'{}': duplicate table entry", attr.name));
        }
        seen[combo] = true;
        t.rows[combo] = entry["probs"].as<std::vector<double>>();
      }
      for (std::size_t combo = 0; combo < combos; ++combo) {
        if (!seen[combo]) {
          throw Error(fmt::format("'{}': conditional table is missing a parent "
                                  "combination",
                                  attr.name));
        }
      }
    }
  } catch (const YAML::Exception& e) {
    throw Error(fmt::format("generator config: {}", e.what()));
  }
  GeneratorSpec spec(std::move(schema), std::move(order), std::move(tables));
  drift.Validate(spec.schema());
  return {std::move(spec), std::move(drift)};
}

GeneratorConfig LoadGeneratorConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseGeneratorConfig(ss.str());
}

std::string GeneratorConfigYaml(const GeneratorSpec& spec,
                                const DriftSpec& drift) {
  const Schema& schema = spec.schema();
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap << YAML::Key << "attributes" << YAML::Value
      << YAML::BeginSeq;
  for (std::size_t a : spec.order()) {
    const AttributeSpec& attr = schema.attribute(a);
    const ConditionalTable& t = spec.table(a);
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << attr.name;
    out << YAML::Key << "role" << YAML::Value << std::string(RoleName(attr.role));
    out << YAML::Key << "levels" << YAML::Value << YAML::Flow << attr.levels;
    if (!t.parents.empty()) {
      std::vector<std::string> parents;
      for (std::size_t p : t.parents) parents.push_back(schema.attribute(p).name);
      out << YAML::Key << "parents" << YAML::Value << YAML::Flow << parents;
    }
    out << YAML::Key << "persistence" << YAML::Value << drift.persistence[a];
    out << YAML::Key << "table" << YAML::Value << YAML::BeginSeq;
    for (std::size_t combo = 0; combo < t.rows.size(); ++combo) {
      out << YAML::BeginMap;
      if (!t.parents.empty()) {
        std::vector<std::string> given;
        for (std::size_t j = 0; const Level l : DecodeCombination(schema, t.parents, combo)) {
          given.push_back(schema.attribute(t.parents[j++]).levels[l]);
        }
        out << YAML::Key << "given" << YAML::Value << YAML::Flow << given;
      }
      out << YAML::Key << "probs" << YAML::Value << YAML::Flow << t.rows[combo];
      out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace lomia
