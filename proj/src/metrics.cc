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

#include "lomia/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace lomia {
namespace {

void CheckLengths(std::size_t a, std::size_t b) {
  if (a != b) throw Error(fmt::format("length mismatch: {} vs {}", a, b));
  if (a == 0) throw Error("metrics need at least one record");
}

double Ratio(double num, double den) { return den == 0 ? 0.0 : num / den; }

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::span<const Level> truth,
                                 std::span<const Level> pred,
                                 std::optional<std::size_t> num_classes) {
  CheckLengths(truth.size(), pred.size());
  std::vector<std::size_t> position;
  if (num_classes) {
    classes_.resize(*num_classes);
    std::iota(classes_.begin(), classes_.end(), Level{0});
  } else {
    classes_.assign(truth.begin(), truth.end());
    classes_.insert(classes_.end(), pred.begin(), pred.end());
    std::sort(classes_.begin(), classes_.end());
    classes_.erase(std::unique(classes_.begin(), classes_.end()), classes_.end());
  }
  const std::size_t max_label = classes_.empty() ? 0 : classes_.back();
  position.assign(max_label + 1, classes_.size());
  for (std::size_t i = 0; i < classes_.size(); ++i) position[classes_[i]] = i;
  counts_.assign(classes_.size() * classes_.size(), 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] > max_label || pred[i] > max_label) {
      throw Error(fmt::format("label out of range for {} classes", classes_.size()));
    }
    ++counts_[position[truth[i]] * classes_.size() + position[pred[i]]];
  }
  total_ = truth.size();
}

std::uint64_t ConfusionMatrix::support(std::size_t c) const {
  std::uint64_t s = 0;
  for (std::size_t j = 0; j < classes_.size(); ++j) s += count(c, j);
  return s;
}

std::uint64_t ConfusionMatrix::predicted(std::size_t c) const {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < classes_.size(); ++i) s += count(i, c);
  return s;
}

PrecisionRecall PrecisionRecallMacro(std::span<const Level> truth,
                                     std::span<const Level> pred,
                                     std::optional<std::size_t> num_classes) {
  ConfusionMatrix cm(truth, pred, num_classes);
  const std::size_t k = cm.classes().size();
  PrecisionRecall out;
  for (std::size_t c = 0; c < k; ++c) {
    const double tp = static_cast<double>(cm.true_positives(c));
    out.precision += Ratio(tp, static_cast<double>(cm.predicted(c)));
    out.recall += Ratio(tp, static_cast<double>(cm.support(c)));
  }
  out.precision /= static_cast<double>(k);
  out.recall /= static_cast<double>(k);
  return out;
}

double F1Macro(std::span<const Level> truth, std::span<const Level> pred,
               std::optional<std::size_t> num_classes) {
  ConfusionMatrix cm(truth, pred, num_classes);
  const std::size_t k = cm.classes().size();
  double total = 0;
  for (std::size_t c = 0; c < k; ++c) {
    // F1 = 2tp / (2tp + fp + fn) = 2tp / (support + predicted).
    const double tp = static_cast<double>(cm.true_positives(c));
    total += Ratio(2 * tp, static_cast<double>(cm.support(c) + cm.predicted(c)));
  }
  return total / static_cast<double>(k);
}

double Accuracy(std::span<const Level> truth, std::span<const Level> pred) {
  CheckLengths(truth.size(), pred.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == pred[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double Mcc(std::span<const Level> truth, std::span<const Level> pred) {
  CheckLengths(truth.size(), pred.size());
  double tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] > 1 || pred[i] > 1) throw Error("MCC needs binary labels");
    if (truth[i] == 1) {
      (pred[i] == 1 ? tp : fn) += 1;
    } else {
      (pred[i] == 1 ? fp : tn) += 1;
    }
  }
  const double den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (den == 0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(den);
}

double Auc(std::span<const Level> truth, std::span<const double> scores) {
  CheckLengths(truth.size(), scores.size());
  const std::size_t n = truth.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Sum of (tie-averaged, 1-based) ranks of the positives.
  double positive_rank_sum = 0;
  double positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2;
    for (std::size_t t = i; t < j; ++t) {
      if (truth[order[t]] > 1) throw Error("AUC needs binary labels");
      if (truth[order[t]] == 1) {
        positive_rank_sum += mid_rank;
        positives += 1;
      }
    }
    i = j;
  }
  const double negatives = static_cast<double>(n) - positives;
  if (positives == 0 || negatives == 0) {
    throw Error("AUC needs both positive and negative records");
  }
  const double u = positive_rank_sum - positives * (positives + 1) / 2;
  return u / (positives * negatives);
}

}  // namespace lomia
