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

// Classification metrics for utility and attack evaluation.
//
// Macro averages run over a class set: either 0..num_classes-1 when given,
// or the union of labels seen in truth and predictions. Any 0/0 ratio
// (precision, recall, F1, MCC) is defined as 0.

#ifndef LOMIA_METRICS_H_
#define LOMIA_METRICS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lomia/common.h"

namespace lomia {

class ConfusionMatrix {
 public:
  ConfusionMatrix(std::span<const Level> truth, std::span<const Level> pred,
                  std::optional<std::size_t> num_classes = std::nullopt);

  // Class labels covered, ascending.
  const std::vector<Level>& classes() const { return classes_; }
  // Counts indexed by positions in classes().
  std::uint64_t count(std::size_t true_class, std::size_t pred_class) const {
    return counts_[true_class * classes_.size() + pred_class];
  }
  std::uint64_t total() const { return total_; }

  std::uint64_t true_positives(std::size_t c) const { return count(c, c); }
  std::uint64_t support(std::size_t c) const;    // row sum
  std::uint64_t predicted(std::size_t c) const;  // column sum

 private:
  std::vector<Level> classes_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

struct PrecisionRecall {
  double precision = 0;
  double recall = 0;
};

double F1Macro(std::span<const Level> truth, std::span<const Level> pred,
               std::optional<std::size_t> num_classes = std::nullopt);
PrecisionRecall PrecisionRecallMacro(
    std::span<const Level> truth, std::span<const Level> pred,
    std::optional<std::size_t> num_classes = std::nullopt);
double Accuracy(std::span<const Level> truth, std::span<const Level> pred);

// Binary labels (0 = negative, 1 = positive).
double Mcc(std::span<const Level> truth, std::span<const Level> pred);

// Mann-Whitney form: P(score of a random positive > score of a random
// negative), ties count 1/2. Requires both classes.
double Auc(std::span<const Level> truth, std::span<const double> scores);

}  // namespace lomia

#endif  // LOMIA_METRICS_H_
