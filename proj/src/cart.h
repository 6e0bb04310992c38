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

// Gini CART over categorical predictors, shared by the classifiers and the
// sequential synthesizer. Every internal node is a one-level-vs-rest test:
// records with value == level go left, all others go right, so any record
// (including unseen level combinations) reaches exactly one leaf.

#ifndef LOMIA_SRC_CART_H_
#define LOMIA_SRC_CART_H_

#include <cstdint>
#include <span>
#include <vector>

#include "lomia/common.h"

namespace lomia::internal {

struct CartOptions {
  std::size_t max_depth = 0;  // 0 = unbounded
  std::size_t min_leaf = 1;
  // Candidate predictors drawn per node; 0 = all. When none of the drawn
  // predictors admits a valid split the remaining ones are tried as well.
  std::size_t features_per_split = 0;
  // Extra-trees: one random valid level per candidate predictor.
  bool random_split_level = false;
  // Stop instead of taking a zero-gain split.
  bool require_positive_gain = false;
};

// Row-major level matrix; predictor j of row r is
// data[r * stride + columns[j]].
struct PredictorMatrix {
  const Level* data = nullptr;
  std::size_t stride = 0;
  std::vector<std::size_t> columns;
  std::vector<std::size_t> num_levels;  // per predictor
};

class CategoricalTree {
 public:
  struct Node {
    std::int32_t column = -1;  // record index tested; -1 for leaves
    Level level = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;

    bool is_leaf() const { return column < 0; }
  };

  CategoricalTree() = default;
  CategoricalTree(std::size_t num_classes, std::vector<Node> nodes,
                  std::vector<std::uint32_t> counts);

  // Leaf reached by a record laid out like the training stride.
  std::size_t Route(std::span<const Level> record) const;

  std::size_t num_classes() const { return num_classes_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<std::uint32_t>& counts() const { return counts_; }
  std::span<const std::uint32_t> node_counts(std::size_t node) const {
    return {counts_.data() + node * num_classes_, num_classes_};
  }

  bool operator==(const CategoricalTree&) const = default;

 private:
  std::size_t num_classes_ = 0;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> counts_;  // class counts per node
};

// Grows a tree over the given training rows (duplicates allowed, e.g. a
// bootstrap sample). `rng` is only used when features_per_split or
// random_split_level ask for randomness.
CategoricalTree GrowTree(const PredictorMatrix& x, std::span<const Level> y,
                         std::size_t num_classes, std::vector<std::uint32_t> rows,
                         const CartOptions& options, Rng& rng);

double GiniImpurity(std::span<const std::uint32_t> counts);

}  // namespace lomia::internal

#endif  // LOMIA_SRC_CART_H_
