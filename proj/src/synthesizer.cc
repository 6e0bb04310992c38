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

#include "lomia/synthesizer.h"

#include <algorithm>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "cart.h"
#include "lomia/features.h"

namespace lomia {

using internal::CategoricalTree;

std::vector<std::string> DefaultVisitingSequence(const Dataset& train) {
  const Schema& schema = train.schema();
  auto target = schema.target_index();
  if (!target || train.empty()) return schema.names();
  std::vector<std::string> sequence;
  for (const FeatureScore& s : RankFeatures(train, schema.attribute(*target).name)) {
    sequence.push_back(s.name);
  }
  sequence.push_back(schema.attribute(*target).name);
  return sequence;
}

SynthModel::~SynthModel() = default;
SynthModel::SynthModel(SynthModel&&) noexcept = default;
SynthModel& SynthModel::operator=(SynthModel&&) noexcept = default;

std::size_t SynthModel::RouteLeaf(std::size_t position,
                                  std::span<const Level> record) const {
  if (position == 0 || position >= sequence_.size()) {
    throw Error("visiting position has no tree");
  }
  if (record.size() != schema_.size()) throw Error("record does not match schema");
  return trees_[position - 1].Route(record);
}

std::span<const std::uint32_t> SynthModel::LeafCounts(std::size_t position,
                                                      std::size_t leaf) const {
  if (position == 0 || position >= sequence_.size()) {
    throw Error("visiting position has no tree");
  }
  return trees_[position - 1].node_counts(leaf);
}

std::vector<std::size_t> SynthModel::Leaves(std::size_t position) const {
  if (position == 0 || position >= sequence_.size()) {
    throw Error("visiting position has no tree");
  }
  std::vector<std::size_t> out;
  const auto& nodes = trees_[position - 1].nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].is_leaf()) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> SynthModel::TestedAttributes(std::size_t position) const {
  if (position == 0 || position >= sequence_.size()) {
    throw Error("visiting position has no tree");
  }
  std::set<std::size_t> tested;
  for (const auto& node : trees_[position - 1].nodes()) {
    if (!node.is_leaf()) tested.insert(static_cast<std::size_t>(node.column));
  }
  return {tested.begin(), tested.end()};
}

SynthModel FitSequentialCart(const Dataset& train, const SynthesisConfig& config) {
  if (train.empty()) throw Error("cannot fit a synthesizer on an empty dataset");
  if (config.min_leaf == 0) throw Error("min_leaf must be >= 1");
  const Schema& schema = train.schema();
  const std::vector<std::string> names = config.visiting_sequence.empty()
                                             ? DefaultVisitingSequence(train)
                                             : config.visiting_sequence;
  if (names.size() != schema.size()) {
    throw Error("visiting sequence must list every attribute exactly once");
  }
  SynthModel model;
  model.schema_ = schema;
  std::vector<bool> seen(schema.size(), false);
  for (const std::string& name : names) {
    const std::size_t idx = schema.Require(name);
    if (seen[idx]) throw Error(fmt::format("'{}' appears twice in the visiting sequence", name));
    seen[idx] = true;
    model.sequence_.push_back(idx);
  }

  const std::size_t first = model.sequence_.front();
  model.first_counts_.assign(schema.attribute(first).num_levels(), 0);
  for (std::size_t r = 0; r < train.num_rows(); ++r) ++model.first_counts_[train.at(r, first)];

  internal::CartOptions options;
  options.min_leaf = config.min_leaf;
  options.require_positive_gain = true;
  const std::size_t m = schema.size();
  model.trees_.resize(m - 1);
  ParallelFor(m - 1, [&](std::size_t i) {
    const std::size_t position = i + 1;
    const std::size_t attribute = model.sequence_[position];
    internal::PredictorMatrix x;
    x.data = train.cells().data();
    x.stride = m;
    for (std::size_t p = 0; p < position; ++p) {
      x.columns.push_back(model.sequence_[p]);
      x.num_levels.push_back(schema.attribute(model.sequence_[p]).num_levels());
    }
    const std::vector<Level> y = train.Column(attribute);
    std::vector<std::uint32_t> rows(train.num_rows());
    std::iota(rows.begin(), rows.end(), 0u);
    Rng rng(DeriveSeed(config.seed, position));
    model.trees_[i] = internal::GrowTree(x, y, schema.attribute(attribute).num_levels(),
                                         std::move(rows), options, rng);
  });
  return model;
}

Dataset Generate(const SynthModel& model, std::size_t n, Seed seed,
                 std::int64_t first_id) {
  if (n == 0) throw Error("synthetic dataset size must be >= 1");
  const std::size_t m = model.schema().size();
  std::vector<Level> cells(n * m, 0);
  std::vector<std::int64_t> ids(n);
  const auto& first = model.first_marginal_counts();
  const std::vector<double> first_weights(first.begin(), first.end());
  ParallelFor(n, [&](std::size_t r) {
    Rng rng(DeriveSeed(seed, r));
    std::span<Level> row(cells.data() + r * m, m);
    row[model.sequence().front()] = static_cast<Level>(SampleCategorical(first_weights, rng));
    std::vector<double> leaf_weights;
    for (std::size_t position = 1; position < m; ++position) {
      auto counts = model.LeafCounts(position, model.RouteLeaf(position, row));
      leaf_weights.assign(counts.begin(), counts.end());
      row[model.sequence()[position]] = static_cast<Level>(SampleCategorical(leaf_weights, rng));
    }
    ids[r] = first_id + static_cast<std::int64_t>(r);
  });
  return Dataset(model.schema(), std::move(ids), std::move(cells));
}

std::vector<AttributeFidelity> CompareMarginals(const Dataset& original,
                                                const Dataset& synthetic) {
  if (!(original.schema() == synthetic.schema())) {
    throw Error("cannot compare marginals: schemas differ");
  }
  const MarginalSet a = ComputeMarginals(original);
  const MarginalSet b = ComputeMarginals(synthetic);
  std::vector<AttributeFidelity> out;
  for (std::size_t c = 0; c < original.schema().size(); ++c) {
    out.push_back({original.schema().attribute(c).name, TvDistance(a.of(c), b.of(c))});
  }
  return out;
}

}  // namespace lomia
