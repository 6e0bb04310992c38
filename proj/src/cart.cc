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

#include <algorithm>
#include <numeric>

namespace lomia::internal {
namespace {

constexpr double kGainTieEps = 1e-12;

struct Split {
  bool found = false;
  std::size_t predictor = 0;
  Level level = 0;
  double gain = 0;
};

class Grower {
 public:
  Grower(const PredictorMatrix& x, std::span<const Level> y,
         std::size_t num_classes, const CartOptions& options, Rng& rng)
      : x_(x), y_(y), k_(num_classes), options_(options), rng_(rng) {}

  CategoricalTree Run(std::vector<std::uint32_t> rows) {
    rows_ = std::move(rows);
    Grow(0, rows_.size(), 0);
    return CategoricalTree(k_, std::move(nodes_), std::move(counts_));
  }

 private:
  Level Value(std::uint32_t row, std::size_t predictor) const {
    return x_.data[row * x_.stride + x_.columns[predictor]];
  }

  std::int32_t Grow(std::size_t begin, std::size_t end, std::size_t depth) {
    const auto index = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();
    counts_.resize(counts_.size() + k_, 0);
    std::uint32_t* counts = counts_.data() + index * k_;
    for (std::size_t i = begin; i < end; ++i) ++counts[y_[rows_[i]]];

    const std::size_t n = end - begin;
    const bool pure =
        std::count_if(counts, counts + k_, [](std::uint32_t c) { return c > 0; }) <= 1;
    if (pure || (options_.max_depth && depth >= options_.max_depth) ||
        n < 2 * options_.min_leaf) {
      return index;
    }
    node_counts_.assign(counts, counts + k_);
    const double parent_gini = GiniImpurity(node_counts_);
    Split split = FindSplit(begin, end, parent_gini);
    if (!split.found || (options_.require_positive_gain && split.gain <= kGainTieEps)) {
      return index;
    }
    auto middle = std::stable_partition(
        rows_.begin() + begin, rows_.begin() + end,
        [&](std::uint32_t r) { return Value(r, split.predictor) == split.level; });
    const std::size_t mid = middle - rows_.begin();
    nodes_[index].column = static_cast<std::int32_t>(x_.columns[split.predictor]);
    nodes_[index].level = split.level;
    const std::int32_t left = Grow(begin, mid, depth + 1);
    const std::int32_t right = Grow(mid, end, depth + 1);
    nodes_[index].left = left;
    nodes_[index].right = right;
    return index;
  }

  Split FindSplit(std::size_t begin, std::size_t end, double parent_gini) {
    const std::size_t num_predictors = x_.columns.size();
    std::vector<std::size_t> order(num_predictors);
    std::iota(order.begin(), order.end(), 0);
    std::size_t draw = num_predictors;
    if (options_.features_per_split && options_.features_per_split < num_predictors) {
      std::shuffle(order.begin(), order.end(), rng_);
      draw = options_.features_per_split;
    }
    Split best;
    for (std::size_t i = 0; i < num_predictors; ++i) {
      if (i >= draw && best.found) break;
      Consider(order[i], begin, end, parent_gini, best);
    }
    return best;
  }

  void Consider(std::size_t predictor, std::size_t begin, std::size_t end,
                double parent_gini, Split& best) {
    const std::size_t levels = x_.num_levels[predictor];
    table_.assign(levels * k_, 0);
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint32_t r = rows_[i];
      ++table_[Value(r, predictor) * k_ + y_[r]];
    }
    const std::size_t n = end - begin;

    valid_.clear();
    for (std::size_t l = 0; l < levels; ++l) {
      std::size_t nl = 0;
      for (std::size_t c = 0; c < k_; ++c) nl += table_[l * k_ + c];
      if (nl >= options_.min_leaf && n - nl >= options_.min_leaf) {
        valid_.push_back(static_cast<Level>(l));
      }
    }
    if (valid_.empty()) return;
    if (options_.random_split_level) {
      std::uniform_int_distribution<std::size_t> pick(0, valid_.size() - 1);
      const Level chosen = valid_[pick(rng_)];
      valid_.assign(1, chosen);
    }
    right_.resize(k_);
    for (Level l : valid_) {
      std::span<const std::uint32_t> left(table_.data() + l * k_, k_);
      std::size_t nl = 0;
      for (std::size_t c = 0; c < k_; ++c) {
        right_[c] = node_counts_[c] - left[c];
        nl += left[c];
      }
      const double wl = static_cast<double>(nl) / static_cast<double>(n);
      const double gain = parent_gini - wl * GiniImpurity(left) -
                          (1.0 - wl) * GiniImpurity(right_);
      const bool better =
          !best.found || gain > best.gain + kGainTieEps ||
          (gain >= best.gain - kGainTieEps &&
           (predictor < best.predictor ||
            (predictor == best.predictor && l < best.level)));
      if (better) best = {true, predictor, l, gain};
    }
  }

  const PredictorMatrix& x_;
  std::span<const Level> y_;
  const std::size_t k_;
  const CartOptions& options_;
  Rng& rng_;

  std::vector<std::uint32_t> rows_;
  std::vector<CategoricalTree::Node> nodes_;
  std::vector<std::uint32_t> counts_;
  std::vector<std::uint32_t> table_;
  std::vector<std::uint32_t> node_counts_;
  std::vector<std::uint32_t> right_;
  std::vector<Level> valid_;
};

}  // namespace

double GiniImpurity(std::span<const std::uint32_t> counts) {
  double n = 0;
  for (std::uint32_t c : counts) n += c;
  if (n == 0) return 0.0;
  double sum_sq = 0;
  for (std::uint32_t c : counts) sum_sq += (c / n) * (c / n);
  return 1.0 - sum_sq;
}

CategoricalTree::CategoricalTree(std::size_t num_classes, std::vector<Node> nodes,
                                 std::vector<std::uint32_t> counts)
    : num_classes_(num_classes), nodes_(std::move(nodes)), counts_(std::move(counts)) {
  if (nodes_.empty() || counts_.size() != nodes_.size() * num_classes_) {
    throw Error("malformed tree");
  }
  const auto size = static_cast<std::int32_t>(nodes_.size());
  for (std::int32_t i = 0; i < size; ++i) {
    const Node& node = nodes_[i];
    if (node.is_leaf()) continue;
    // Preorder layout: children always follow their parent.
    if (node.left <= i || node.left >= size || node.right <= i || node.right >= size) {
      throw Error("malformed tree: child index out of range");
    }
  }
}

std::size_t CategoricalTree::Route(std::span<const Level> record) const {
  std::size_t node = 0;
  while (!nodes_[node].is_leaf()) {
    const Node& n = nodes_[node];
    node = static_cast<std::size_t>(
        record[static_cast<std::size_t>(n.column)] == n.level ? n.left : n.right);
  }
  return node;
}

CategoricalTree GrowTree(const PredictorMatrix& x, std::span<const Level> y,
                         std::size_t num_classes, std::vector<std::uint32_t> rows,
                         const CartOptions& options, Rng& rng) {
  if (rows.empty()) throw Error("cannot grow a tree on zero rows");
  if (options.min_leaf == 0) throw Error("min_leaf must be >= 1");
  return Grower(x, y, num_classes, options, rng).Run(std::move(rows));
}

}  // namespace lomia::internal
