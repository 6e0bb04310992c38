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

#include "cart.h"

#include <numeric>

#include <gtest/gtest.h>

namespace lomia::internal {
namespace {

struct Table {
  std::vector<Level> x;  // row-major
  std::vector<Level> y;
  std::size_t width = 0;

  PredictorMatrix Matrix(std::vector<std::size_t> levels) const {
    PredictorMatrix m;
    m.data = x.data();
    m.stride = width;
    for (std::size_t c = 0; c < width; ++c) m.columns.push_back(c);
    m.num_levels = std::move(levels);
    return m;
  }
};

std::vector<std::uint32_t> AllRows(std::size_t n) {
  std::vector<std::uint32_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0u);
  return rows;
}

Table Xor(int copies) {
  Table t;
  t.width = 2;
  for (int i = 0; i < copies; ++i) {
    for (Level a = 0; a < 2; ++a) {
      for (Level b = 0; b < 2; ++b) {
        t.x.insert(t.x.end(), {a, b});
        t.y.push_back(a ^ b);
      }
    }
  }
  return t;
}

TEST(GiniTest, PureAndBalanced) {
  const std::vector<std::uint32_t> pure = {7, 0}, balanced = {4, 4}, three = {1, 1, 1};
  EXPECT_EQ(GiniImpurity(pure), 0.0);
  EXPECT_DOUBLE_EQ(GiniImpurity(balanced), 0.5);
  EXPECT_NEAR(GiniImpurity(three), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(GiniImpurity(std::vector<std::uint32_t>{0, 0}), 0.0);
}

TEST(GrowTreeTest, ZeroGainSplitsMemorizeXor) {
  const Table t = Xor(3);
  Rng rng(1);
  CartOptions options;
  const CategoricalTree tree =
      GrowTree(t.Matrix({2, 2}), t.y, 2, AllRows(t.y.size()), options, rng);
  for (std::size_t r = 0; r < t.y.size(); ++r) {
    auto counts = tree.node_counts(tree.Route({t.x.data() + 2 * r, 2}));
    EXPECT_EQ(counts[1 - t.y[r]], 0u);
    EXPECT_GT(counts[t.y[r]], 0u);
  }
}

TEST(GrowTreeTest, PositiveGainRuleStopsOnXor) {
  const Table t = Xor(3);
  Rng rng(1);
  CartOptions options;
  options.require_positive_gain = true;
  const CategoricalTree tree =
      GrowTree(t.Matrix({2, 2}), t.y, 2, AllRows(t.y.size()), options, rng);
  EXPECT_EQ(tree.nodes().size(), 1u);
  EXPECT_EQ(tree.counts(), (std::vector<std::uint32_t>{6, 6}));
}

TEST(GrowTreeTest, TiesPreferLowestPredictorThenLevel) {
  // Both predictors copy y, so every candidate split is perfect.
  Table t;
  t.width = 2;
  for (Level v : {0, 1, 1, 0, 1}) {
    t.x.insert(t.x.end(), {v, v});
    t.y.push_back(v);
  }
  Rng rng(3);
  const CategoricalTree tree = GrowTree(t.Matrix({2, 2}), t.y, 2, AllRows(5), {}, rng);
  ASSERT_FALSE(tree.nodes()[0].is_leaf());
  EXPECT_EQ(tree.nodes()[0].column, 0);
  EXPECT_EQ(tree.nodes()[0].level, 0);
}

TEST(GrowTreeTest, MinLeafAndDepthLimits) {
  Table t;
  t.width = 3;
  Rng data_rng(9);
  for (int r = 0; r < 400; ++r) {
    for (int c = 0; c < 3; ++c) t.x.push_back(static_cast<Level>(data_rng() % 4));
    t.y.push_back(static_cast<Level>(data_rng() % 2));
  }
  for (std::size_t min_leaf : {1, 7, 40}) {
    Rng rng(1);
    CartOptions options;
    options.min_leaf = min_leaf;
    const CategoricalTree tree = GrowTree(t.Matrix({4, 4, 4}), t.y, 2, AllRows(400), options, rng);
    std::uint32_t covered = 0;
    for (std::size_t i = 0; i < tree.nodes().size(); ++i) {
      if (!tree.nodes()[i].is_leaf()) continue;
      auto c = tree.node_counts(i);
      EXPECT_GE(c[0] + c[1], min_leaf);
      covered += c[0] + c[1];
    }
    EXPECT_EQ(covered, 400u);
  }
  Rng rng(1);
  CartOptions shallow;
  shallow.max_depth = 1;
  const CategoricalTree stump = GrowTree(t.Matrix({4, 4, 4}), t.y, 2, AllRows(400), shallow, rng);
  EXPECT_LE(stump.nodes().size(), 3u);
}

TEST(GrowTreeTest, NodeCountsAreChildSums) {
  Table t;
  t.width = 2;
  Rng data_rng(2);
  for (int r = 0; r < 200; ++r) {
    t.x.push_back(static_cast<Level>(data_rng() % 3));
    t.x.push_back(static_cast<Level>(data_rng() % 5));
    t.y.push_back(static_cast<Level>((t.x[2 * r] + data_rng() % 2) % 3));
  }
  Rng rng(5);
  const CategoricalTree tree = GrowTree(t.Matrix({3, 5}), t.y, 3, AllRows(200), {}, rng);
  for (std::size_t i = 0; i < tree.nodes().size(); ++i) {
    const auto& node = tree.nodes()[i];
    if (node.is_leaf()) continue;
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_EQ(tree.node_counts(i)[k], tree.node_counts(node.left)[k] +
                                            tree.node_counts(node.right)[k]);
    }
  }
}

TEST(CategoricalTreeTest, RejectsMalformedStructure) {
  using Node = CategoricalTree::Node;
  EXPECT_THROW(CategoricalTree(2, {}, {}), Error);
  EXPECT_THROW(CategoricalTree(2, {Node{}}, {1}), Error);
  // Child index out of range.
  EXPECT_THROW(CategoricalTree(2, {Node{0, 0, 1, 5}, Node{}, Node{}}, {2, 2, 1, 1, 1, 1}), Error);
  EXPECT_NO_THROW(CategoricalTree(2, {Node{0, 0, 1, 2}, Node{}, Node{}}, {2, 2, 1, 1, 1, 1}));
}

}  // namespace
}  // namespace lomia::internal
