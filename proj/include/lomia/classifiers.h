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

// Classifier zoo for the binary target: majority class, categorical naive
// Bayes, CART decision tree, random forest, extra trees and Hamming k-NN.
//
// Features are all non-target attributes of the training schema, in schema
// order. The positive class is target level 1. Every tie (split gain, vote,
// neighbour distance) resolves deterministically; vote ties go to the
// negative class.

#ifndef LOMIA_CLASSIFIERS_H_
#define LOMIA_CLASSIFIERS_H_

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lomia/common.h"
#include "lomia/data.h"
#include "lomia/oracle.h"

namespace lomia {

namespace internal {
class CategoricalTree;
}  // namespace internal

enum class Algorithm {
  kMajority,
  kNaiveBayes,
  kDecisionTree,
  kRandomForest,
  kExtraTrees,
  kKnn,
};

std::string_view AlgorithmName(Algorithm algorithm);
Algorithm ParseAlgorithm(std::string_view name);

struct ClassifierSpec {
  Algorithm algorithm = Algorithm::kRandomForest;
  std::size_t max_depth = 0;  // trees; 0 = unbounded
  std::size_t min_leaf = 1;   // trees
  std::size_t n_trees = 100;  // ensembles
  // Ensembles; 0 = ceil(sqrt(#features)). Single trees consider all.
  std::size_t features_per_split = 0;
  std::size_t k_neighbors = 5;
  double laplace_alpha = 1.0;
  Seed seed = 0;

  void Validate(std::size_t num_features) const;
};

class FittedModel {
 public:
  ~FittedModel();
  FittedModel(FittedModel&&) noexcept;
  FittedModel& operator=(FittedModel&&) noexcept;

  Algorithm algorithm() const { return algorithm_; }
  const Schema& feature_schema() const { return feature_schema_; }
  const AttributeSpec& target() const { return target_; }
  std::uint64_t training_fingerprint() const { return training_fingerprint_; }
  // Hash of feature schema + target; embedded in the persisted model.
  std::uint64_t schema_hash() const;

  // `features` follows feature_schema(). Throws Error on size or level
  // mismatch.
  Level Predict(std::span<const Level> features) const;
  // Probability-like score of the positive class, in [0, 1].
  double PredictScore(std::span<const Level> features) const;

  // Batch helpers over any dataset containing the feature columns (by name).
  std::vector<Level> PredictAll(const Dataset& data) const;
  std::vector<double> ScoreAll(const Dataset& data) const;

  // Ensembles only: each tree's label for the record.
  std::vector<Level> TreeVotes(std::span<const Level> features) const;
  std::size_t num_trees() const;

  void Save(const std::string& path) const;
  static FittedModel Load(const std::string& path);
  std::string ToJson() const;
  static FittedModel FromJson(std::string_view text);

 private:
  friend FittedModel Fit(const ClassifierSpec& spec, const Dataset& train);
  FittedModel() = default;

  void CheckRecord(std::span<const Level> features) const;
  double KnnPositiveFraction(std::span<const Level> features) const;
  double NaiveBayesPosterior(std::span<const Level> features) const;

  Algorithm algorithm_ = Algorithm::kMajority;
  Schema feature_schema_;
  AttributeSpec target_;
  std::uint64_t training_fingerprint_ = 0;
  ClassifierSpec spec_;

  // majority
  Level majority_label_ = 0;
  double positive_rate_ = 0;
  // naive Bayes: class_counts_[y]; level_counts_[f][level * 2 + y]
  std::vector<double> class_counts_;
  std::vector<std::vector<double>> level_counts_;
  // trees
  std::vector<internal::CategoricalTree> trees_;
  // knn
  std::vector<Level> stored_features_;
  std::vector<Level> stored_labels_;
};

// Throws Error on an empty dataset or a dataset without target. A single-class
// target is allowed; the model then predicts that class.
FittedModel Fit(const ClassifierSpec& spec, const Dataset& train);

QueryOracle AsOracle(std::shared_ptr<const FittedModel> model);

}  // namespace lomia

#endif  // LOMIA_CLASSIFIERS_H_
