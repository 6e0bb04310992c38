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

// Fully synthetic data by sequential CART.
//
// The joint distribution is factorised along a visiting sequence
// x1, x2 | x1, ..., xn | x1..x(n-1). The first attribute keeps its empirical
// marginal; every later attribute gets a Gini CART over its predecessors
// (fitted on the original columns) whose leaves keep the multiset of observed
// values. Generation walks the sequence and draws each value from the leaf
// the partially built synthetic row lands in.

#ifndef LOMIA_SYNTHESIZER_H_
#define LOMIA_SYNTHESIZER_H_

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lomia/common.h"
#include "lomia/data.h"

namespace lomia {

namespace internal {
class CategoricalTree;
}  // namespace internal

struct SynthesisConfig {
  // Attribute names; empty = DefaultVisitingSequence(train).
  std::vector<std::string> visiting_sequence;
  // Stopping rule: minimum number of training rows per leaf.
  std::size_t min_leaf = 5;
  Seed seed = 0;
};

// Descending chi2 against the target (ties in schema order), target last.
// Without a target: schema order.
std::vector<std::string> DefaultVisitingSequence(const Dataset& train);

class SynthModel {
 public:
  ~SynthModel();
  SynthModel(SynthModel&&) noexcept;
  SynthModel& operator=(SynthModel&&) noexcept;

  const Schema& schema() const { return schema_; }
  // Schema indices in visiting order.
  const std::vector<std::size_t>& sequence() const { return sequence_; }
  const std::vector<std::uint32_t>& first_marginal_counts() const {
    return first_counts_;
  }

  // Inspection of position i >= 1 (a full schema-ordered record; only the
  // predecessors' cells are read).
  std::size_t RouteLeaf(std::size_t position, std::span<const Level> record) const;
  std::span<const std::uint32_t> LeafCounts(std::size_t position,
                                            std::size_t leaf) const;
  std::vector<std::size_t> Leaves(std::size_t position) const;
  // Schema indices tested anywhere in tree `position`.
  std::vector<std::size_t> TestedAttributes(std::size_t position) const;

 private:
  friend SynthModel FitSequentialCart(const Dataset& train,
                                      const SynthesisConfig& config);
  SynthModel() = default;

  Schema schema_;
  std::vector<std::size_t> sequence_;
  std::vector<std::uint32_t> first_counts_;
  std::vector<internal::CategoricalTree> trees_;  // trees_[i - 1] for position i
};

SynthModel FitSequentialCart(const Dataset& train, const SynthesisConfig& config);

// n synthetic rows with ids first_id..first_id+n-1; row r draws from its own
// stream DeriveSeed(seed, r).
Dataset Generate(const SynthModel& model, std::size_t n, Seed seed,
                 std::int64_t first_id = 0);

struct AttributeFidelity {
  std::string name;
  double tv_distance = 0;
};

// Per-attribute TV distance between the marginals of two datasets with the
// same schema.
std::vector<AttributeFidelity> CompareMarginals(const Dataset& original,
                                                const Dataset& synthetic);

}  // namespace lomia

#endif  // LOMIA_SYNTHESIZER_H_
