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

// Surrogate study populations: a small Bayesian-network style generator with
// per-attribute conditional tables, two-year temporal drift, and the
// inclusive/exclusive split structure used by the experiments.

#ifndef LOMIA_SURROGATE_H_
#define LOMIA_SURROGATE_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lomia/common.h"
#include "lomia/data.h"

namespace lomia {

inline constexpr std::size_t kMaxParents = 2;

// P(attribute | parents). Rows are indexed by the mixed-radix combination of
// parent levels, first parent most significant.
struct ConditionalTable {
  std::vector<std::size_t> parents;  // schema indices
  std::vector<std::vector<double>> rows;

  bool operator==(const ConditionalTable&) const = default;
};

class GeneratorSpec {
 public:
  GeneratorSpec() = default;
  // `order` lists schema indices; every parent must precede its child. Throws
  // Error on cycles, missing parent combinations, rows not summing to 1, or a
  // target that does not (transitively) depend on >= 2 non-sensitive and >= 1
  // sensitive attribute.
  GeneratorSpec(Schema schema, std::vector<std::size_t> order,
                std::vector<ConditionalTable> tables);

  const Schema& schema() const { return schema_; }
  const std::vector<std::size_t>& order() const { return order_; }
  const ConditionalTable& table(std::size_t attribute) const {
    return tables_[attribute];
  }
  // Row of table(attribute) selected by the parent values in `record`.
  std::span<const double> Conditional(std::size_t attribute,
                                      std::span<const Level> record) const;

  bool operator==(const GeneratorSpec&) const = default;

 private:
  Schema schema_;
  std::vector<std::size_t> order_;
  std::vector<ConditionalTable> tables_;
};

// Probability that an attribute keeps its value between the two waves.
struct DriftSpec {
  std::vector<double> persistence;  // per schema attribute

  void Validate(const Schema& schema) const;
  bool operator==(const DriftSpec&) const = default;
};

struct SplitBundle {
  Dataset inclusive_2013;
  Dataset inclusive_2015;
  Dataset exclusive_2015;
};

// Ancestral sampling; row r uses its own stream DeriveSeed(seed, r) and gets
// id first_id + r.
Dataset GeneratePopulation(const GeneratorSpec& spec, std::size_t n, Seed seed,
                           std::int64_t first_id = 0);

// Per row and attribute (in dependency order): keep the value with the
// attribute's persistence probability, else redraw it from its conditional
// given the already drifted parents. Streams are keyed by row id.
Dataset ApplyTemporalDrift(const Dataset& data, const GeneratorSpec& spec,
                           const DriftSpec& drift, Seed seed);

// inclusive_2013: n_train individuals (ids 0..n_train-1); inclusive_2015: the
// same individuals after drift; exclusive_2015: n_exclusive fresh individuals
// (ids from n_train on).
SplitBundle MakeStudySplits(const GeneratorSpec& spec, const DriftSpec& drift,
                            std::size_t n_train, std::size_t n_exclusive,
                            Seed seed);

// Shipped defaults: 12 non-sensitive attributes, gender(2)/age(5)/income(5)
// sensitive attributes and the binary target "moved" (base rate ~0.25).
GeneratorSpec DefaultGeneratorSpec();
DriftSpec DefaultDriftSpec(const GeneratorSpec& spec);

// Generator config: the schema config format plus, per attribute,
//
//   parents: [age, gender]     # optional, at most two
//   persistence: 0.9           # optional drift probability, default 1
//   table:                     # one entry per parent-level combination
//     - given: [a18_29, F]     # omitted for root attributes
//       probs: [0.7, 0.2, 0.1]
//
// Attributes are listed in dependency order.
struct GeneratorConfig {
  GeneratorSpec spec;
  DriftSpec drift;
};
GeneratorConfig ParseGeneratorConfig(std::string_view yaml_text);
GeneratorConfig LoadGeneratorConfig(const std::string& path);
std::string GeneratorConfigYaml(const GeneratorSpec& spec,
                                const DriftSpec& drift);

}  // namespace lomia

#endif  // LOMIA_SURROGATE_H_
