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

#include "lomia/classifiers.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include <nlohmann/json.hpp>

#include "cart.h"

namespace lomia {

using internal::CategoricalTree;

namespace {

constexpr int kModelFormatVersion = 1;

struct AlgorithmNameEntry {
  Algorithm algorithm;
  std::string_view name;
};

constexpr AlgorithmNameEntry kAlgorithmNames[] = {
    {Algorithm::kMajority, "majority"},
    {Algorithm::kNaiveBayes, "naive_bayes"},
    {Algorithm::kDecisionTree, "decision_tree"},
    {Algorithm::kRandomForest, "random_forest"},
    {Algorithm::kExtraTrees, "extra_trees"},
    {Algorithm::kKnn, "knn"},
};

bool IsEnsemble(Algorithm a) {
  return a == Algorithm::kRandomForest || a == Algorithm::kExtraTrees;
}

bool IsTreeBased(Algorithm a) {
  return a == Algorithm::kDecisionTree || IsEnsemble(a);
}

Level MajorityOf(std::size_t negatives, std::size_t positives) {
  return positives > negatives ? Level{1} : Level{0};
}

Level TreeLabel(const CategoricalTree& tree, std::span<const Level> features) {
  auto counts = tree.node_counts(tree.Route(features));
  return MajorityOf(counts[0], counts[1]);
}

double TreeScore(const CategoricalTree& tree, std::span<const Level> features) {
  auto counts = tree.node_counts(tree.Route(features));
  const double total = static_cast<double>(counts[0]) + counts[1];
  return total == 0 ? 0.0 : counts[1] / total;
}

std::size_t ResolvedFeaturesPerSplit(const ClassifierSpec& spec,
                                     std::size_t num_features) {
  if (!IsEnsemble(spec.algorithm)) return 0;
  if (spec.features_per_split) return spec.features_per_split;
  return static_cast<std::size_t>(
      std::ceil(std::sqrt(static_cast<double>(num_features))));
}

nlohmann::ordered_json SchemaJson(const Schema& schema) {
  auto out = nlohmann::ordered_json::array();
  for (const AttributeSpec& a : schema.attributes()) {
    out.push_back({{"name", a.name}, {"role", RoleName(a.role)}, {"levels", a.levels}});
  }
  return out;
}

Schema SchemaFromJson(const nlohmann::json& j) {
  std::vector<AttributeSpec> attrs;
  for (const auto& e : j) {
    attrs.push_back({e.at("name").get<std::string>(),
                     e.at("levels").get<std::vector<std::string>>(),
                     ParseRole(e.at("role").get<std::string>())});
  }
  return Schema(std::move(attrs));
}

}  // namespace

std::string_view AlgorithmName(Algorithm algorithm) {
  for (const auto& e : kAlgorithmNames) {
    if (e.algorithm == algorithm) return e.name;
  }
  return "unknown";
}

Algorithm ParseAlgorithm(std::string_view name) {
  for (const auto& e : kAlgorithmNames) {
    if (e.name == name) return e.algorithm;
  }
  throw Error(fmt::format("unknown classifier '{}'", name));
}

void ClassifierSpec::Validate(std::size_t num_features) const {
  if (min_leaf == 0) throw Error("min_leaf must be >= 1");
  if (n_trees == 0) throw Error("n_trees must be >= 1");
  if (k_neighbors == 0) throw Error("k_neighbors must be >= 1");
  if (!(laplace_alpha > 0)) throw Error("laplace_alpha must be > 0");
  if (features_per_split > num_features) {
    throw Error(fmt::format("features_per_split = {} exceeds the {} features",
                            features_per_split, num_features));
  }
}

FittedModel::~FittedModel() = default;
FittedModel::FittedModel(FittedModel&&) noexcept = default;
FittedModel& FittedModel::operator=(FittedModel&&) noexcept = default;

std::uint64_t FittedModel::schema_hash() const {
  std::string text = feature_schema_.Canonical();
  text += "|target:" + target_.name + ':';
  for (const std::string& l : target_.levels) text += l + ',';
  return Fnv1a(text);
}

FittedModel Fit(const ClassifierSpec& spec, const Dataset& train) {
  if (train.empty()) throw Error("cannot fit a classifier on an empty dataset");
  const Schema& schema = train.schema();
  const auto target_index = schema.target_index();
  if (!target_index) throw Error("training data has no target attribute");

  FittedModel model;
  model.algorithm_ = spec.algorithm;
  model.target_ = schema.attribute(*target_index);
  std::vector<AttributeSpec> features;
  std::vector<std::size_t> feature_columns;
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (c == *target_index) continue;
    features.push_back(schema.attribute(c));
    feature_columns.push_back(c);
  }
  model.feature_schema_ = Schema(std::move(features));
  model.training_fingerprint_ = train.Fingerprint();
  const std::size_t f = feature_columns.size();
  spec.Validate(f);
  model.spec_ = spec;

  const std::size_t n = train.num_rows();
  std::vector<Level> x(n * f);
  std::vector<Level> y(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < f; ++j) x[r * f + j] = train.at(r, feature_columns[j]);
    y[r] = train.at(r, *target_index);
  }
  const std::size_t positives = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  model.majority_label_ = MajorityOf(n - positives, positives);
  model.positive_rate_ = static_cast<double>(positives) / static_cast<double>(n);

  switch (spec.algorithm) {
    case Algorithm::kMajority:
      break;
    case Algorithm::kNaiveBayes: {
      model.class_counts_ = {static_cast<double>(n - positives),
                             static_cast<double>(positives)};
      model.level_counts_.resize(f);
      for (std::size_t j = 0; j < f; ++j) {
        model.level_counts_[j].assign(model.feature_schema_.attribute(j).num_levels() * 2, 0);
      }
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < f; ++j) model.level_counts_[j][x[r * f + j] * 2 + y[r]] += 1;
      }
      break;
    }
    case Algorithm::kDecisionTree:
    case Algorithm::kRandomForest:
    case Algorithm::kExtraTrees: {
      internal::PredictorMatrix matrix;
      matrix.data = x.data();
      matrix.stride = f;
      for (std::size_t j = 0; j < f; ++j) {
        matrix.columns.push_back(j);
        matrix.num_levels.push_back(model.feature_schema_.attribute(j).num_levels());
      }
      internal::CartOptions options;
      options.max_depth = spec.max_depth;
      options.min_leaf = spec.min_leaf;
      options.features_per_split = ResolvedFeaturesPerSplit(spec, f);
      options.random_split_level = spec.algorithm == Algorithm::kExtraTrees;
      const std::size_t count = IsEnsemble(spec.algorithm) ? spec.n_trees : 1;
      model.trees_.resize(count);
      ParallelFor(count, [&](std::size_t t) {
        Rng rng(DeriveSeed(spec.seed, t));
        std::vector<std::uint32_t> rows(n);
        if (spec.algorithm == Algorithm::kRandomForest) {
          std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));
          for (auto& r : rows) r = pick(rng);
        } else {
          std::iota(rows.begin(), rows.end(), 0u);
        }
        model.trees_[t] = internal::GrowTree(matrix, y, 2, std::move(rows), options, rng);
      });
      break;
    }
    case Algorithm::kKnn:
      model.stored_features_ = std::move(x);
      model.stored_labels_ = std::move(y);
      break;
  }
  return model;
}

void FittedModel::CheckRecord(std::span<const Level> features) const {
  if (features.size() != feature_schema_.size()) {
    throw Error(fmt::format("record has {} features, model expects {}",
                            features.size(), feature_schema_.size()));
  }
  for (std::size_t j = 0; j < features.size(); ++j) {
    if (features[j] >= feature_schema_.attribute(j).num_levels()) {
      throw Error(fmt::format("feature '{}': level index {} out of range",
                              feature_schema_.attribute(j).name, features[j]));
    }
  }
}

double FittedModel::NaiveBayesPosterior(std::span<const Level> features) const {
  double log_joint[2];
  const double n = class_counts_[0] + class_counts_[1];
  for (int c = 0; c < 2; ++c) {
    if (class_counts_[c] == 0) {
      log_joint[c] = -INFINITY;
      continue;
    }
    double lp = std::log(class_counts_[c] / n);
    for (std::size_t j = 0; j < features.size(); ++j) {
      const double k = static_cast<double>(feature_schema_.attribute(j).num_levels());
      lp += std::log((level_counts_[j][features[j] * 2 + c] + spec_.laplace_alpha) /
                     (class_counts_[c] + spec_.laplace_alpha * k));
    }
    log_joint[c] = lp;
  }
  if (log_joint[1] == -INFINITY) return 0.0;
  if (log_joint[0] == -INFINITY) return 1.0;
  // P(1|x) = 1 / (1 + exp(lj0 - lj1)).
  return 1.0 / (1.0 + std::exp(log_joint[0] - log_joint[1]));
}

double FittedModel::KnnPositiveFraction(std::span<const Level> features) const {
  const std::size_t f = feature_schema_.size();
  const std::size_t n = stored_labels_.size();
  const std::size_t k = std::min(spec_.k_neighbors, n);
  // Hamming distances are bounded by f, so bucket them; within a distance the
  // lowest training index wins.
  std::vector<std::uint32_t> bucket_total(f + 1, 0);
  std::vector<std::uint32_t> distance(n);
  for (std::size_t r = 0; r < n; ++r) {
    const Level* row = stored_features_.data() + r * f;
    std::uint32_t d = 0;
    for (std::size_t j = 0; j < f; ++j) d += row[j] != features[j];
    distance[r] = d;
    ++bucket_total[d];
  }
  std::size_t cutoff = 0;
  std::size_t below = 0;
  while (below + bucket_total[cutoff] < k) below += bucket_total[cutoff++];
  std::size_t taken_at_cutoff = 0;
  std::size_t positives = 0;
  for (std::size_t r = 0; r < n; ++r) {
    if (distance[r] < cutoff) {
      positives += stored_labels_[r];
    } else if (distance[r] == cutoff && taken_at_cutoff < k - below) {
      positives += stored_labels_[r];
      ++taken_at_cutoff;
    }
  }
  return static_cast<double>(positives) / static_cast<double>(k);
}

Level FittedModel::Predict(std::span<const Level> features) const {
  CheckRecord(features);
  switch (algorithm_) {
    case Algorithm::kMajority:
      return majority_label_;
    case Algorithm::kNaiveBayes:
      return NaiveBayesPosterior(features) > 0.5 ? Level{1} : Level{0};
    case Algorithm::kDecisionTree:
      return TreeLabel(trees_.front(), features);
    case Algorithm::kRandomForest:
    case Algorithm::kExtraTrees: {
      std::size_t votes = 0;
      for (const CategoricalTree& tree : trees_) votes += TreeLabel(tree, features);
      return MajorityOf(trees_.size() - votes, votes);
    }
    case Algorithm::kKnn:
      return KnnPositiveFraction(features) > 0.5 ? Level{1} : Level{0};
  }
  return 0;
}

double FittedModel::PredictScore(std::span<const Level> features) const {
  CheckRecord(features);
  switch (algorithm_) {
    case Algorithm::kMajority:
      return positive_rate_;
    case Algorithm::kNaiveBayes:
      return NaiveBayesPosterior(features);
    case Algorithm::kDecisionTree:
      return TreeScore(trees_.front(), features);
    case Algorithm::kRandomForest:
    case Algorithm::kExtraTrees: {
      double total = 0;
      for (const CategoricalTree& tree : trees_) total += TreeScore(tree, features);
      return total / static_cast<double>(trees_.size());
    }
    case Algorithm::kKnn:
      return KnnPositiveFraction(features);
  }
  return 0;
}

std::size_t FittedModel::num_trees() const { return trees_.size(); }

std::vector<Level> FittedModel::TreeVotes(std::span<const Level> features) const {
  CheckRecord(features);
  std::vector<Level> votes;
  votes.reserve(trees_.size());
  for (const CategoricalTree& tree : trees_) votes.push_back(TreeLabel(tree, features));
  return votes;
}

std::vector<Level> FittedModel::PredictAll(const Dataset& data) const {
  const Dataset features = ProjectToSchema(data, feature_schema_);
  std::vector<Level> out(features.num_rows());
  ParallelFor(features.num_rows(), [&](std::size_t r) { out[r] = Predict(features.row(r)); });
  return out;
}

std::vector<double> FittedModel::ScoreAll(const Dataset& data) const {
  const Dataset features = ProjectToSchema(data, feature_schema_);
  std::vector<double> out(features.num_rows());
  ParallelFor(features.num_rows(),
              [&](std::size_t r) { out[r] = PredictScore(features.row(r)); });
  return out;
}

std::string FittedModel::ToJson() const {
  nlohmann::ordered_json j;
  j["format"] = "lomia-model";
  j["version"] = kModelFormatVersion;
  j["schema_hash"] = HexU64(schema_hash());
  j["algorithm"] = AlgorithmName(algorithm_);
  j["training_fingerprint"] = HexU64(training_fingerprint_);
  j["spec"] = {{"max_depth", spec_.max_depth},
               {"min_leaf", spec_.min_leaf},
               {"n_trees", spec_.n_trees},
               {"features_per_split", spec_.features_per_split},
               {"k_neighbors", spec_.k_neighbors},
               {"laplace_alpha", spec_.laplace_alpha},
               {"seed", spec_.seed}};
  j["features"] = SchemaJson(feature_schema_);
  j["target"] = {{"name", target_.name}, {"levels", target_.levels}};
  j["majority"] = {{"label", majority_label_}, {"positive_rate", positive_rate_}};
  if (algorithm_ == Algorithm::kNaiveBayes) {
    j["naive_bayes"] = {{"class_counts", class_counts_}, {"level_counts", level_counts_}};
  }
  if (IsTreeBased(algorithm_)) {
    auto trees = nlohmann::ordered_json::array();
    for (const CategoricalTree& tree : trees_) {
      std::vector<std::int32_t> column, left, right;
      std::vector<Level> level;
      for (const auto& node : tree.nodes()) {
        column.push_back(node.column);
        level.push_back(node.level);
        left.push_back(node.left);
        right.push_back(node.right);
      }
      trees.push_back({{"column", column},
                       {"level", level},
                       {"left", left},
                       {"right", right},
                       {"counts", tree.counts()}});
    }
    j["trees"] = std::move(trees);
  }
  if (algorithm_ == Algorithm::kKnn) {
    j["knn"] = {{"features", stored_features_}, {"labels", stored_labels_}};
  }
  return j.dump();
}

FittedModel FittedModel::FromJson(std::string_view text) {
  FittedModel model;
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (j.at("format") != "lomia-model") throw Error("not a lomia model file");
    if (j.at("version") != kModelFormatVersion) {
      throw Error(fmt::format("unsupported model format version {}",
                              j.at("version").dump()));
    }
    model.algorithm_ = ParseAlgorithm(j.at("algorithm").get<std::string>());
    model.feature_schema_ = SchemaFromJson(j.at("features"));
    model.target_ = {j.at("target").at("name").get<std::string>(),
                     j.at("target").at("levels").get<std::vector<std::string>>(),
                     Role::kTarget};
    if (HexU64(model.schema_hash()) != j.at("schema_hash").get<std::string>()) {
      throw Error("model schema hash mismatch");
    }
    model.training_fingerprint_ =
        std::stoull(j.at("training_fingerprint").get<std::string>(), nullptr, 16);
    const auto& s = j.at("spec");
    model.spec_.algorithm = model.algorithm_;
    model.spec_.max_depth = s.at("max_depth");
    model.spec_.min_leaf = s.at("min_leaf");
    model.spec_.n_trees = s.at("n_trees");
    model.spec_.features_per_split = s.at("features_per_split");
    model.spec_.k_neighbors = s.at("k_neighbors");
    model.spec_.laplace_alpha = s.at("laplace_alpha");
    model.spec_.seed = s.at("seed");
    model.majority_label_ = j.at("majority").at("label");
    model.positive_rate_ = j.at("majority").at("positive_rate");
    if (model.algorithm_ == Algorithm::kNaiveBayes) {
      model.class_counts_ = j.at("naive_bayes").at("class_counts").get<std::vector<double>>();
      model.level_counts_ =
          j.at("naive_bayes").at("level_counts").get<std::vector<std::vector<double>>>();
      if (model.class_counts_.size() != 2 ||
          model.level_counts_.size() != model.feature_schema_.size()) {
        throw Error("malformed naive Bayes tables");
      }
      for (std::size_t f = 0; f < model.level_counts_.size(); ++f) {
        if (model.level_counts_[f].size() != model.feature_schema_.attribute(f).num_levels() * 2) {
          throw Error("malformed naive Bayes tables");
        }
      }
    }
    if (IsTreeBased(model.algorithm_)) {
      const std::size_t f = model.feature_schema_.size();
      for (const auto& t : j.at("trees")) {
        const auto column = t.at("column").get<std::vector<std::int32_t>>();
        const auto level = t.at("level").get<std::vector<Level>>();
        const auto left = t.at("left").get<std::vector<std::int32_t>>();
        const auto right = t.at("right").get<std::vector<std::int32_t>>();
        if (level.size() != column.size() || left.size() != column.size() ||
            right.size() != column.size()) {
          throw Error("malformed tree arrays");
        }
        std::vector<CategoricalTree::Node> nodes(column.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) {
          if (column[i] >= static_cast<std::int32_t>(f)) throw Error("tree tests unknown feature");
          nodes[i] = {column[i], level[i], left[i], right[i]};
        }
        model.trees_.emplace_back(2, std::move(nodes),
                                  t.at("counts").get<std::vector<std::uint32_t>>());
      }
      if (model.trees_.empty()) throw Error("tree model without trees");
    }
    if (model.algorithm_ == Algorithm::kKnn) {
      model.stored_features_ = j.at("knn").at("features").get<std::vector<Level>>();
      model.stored_labels_ = j.at("knn").at("labels").get<std::vector<Level>>();
      if (model.stored_labels_.empty() ||
          model.stored_features_.size() !=
              model.stored_labels_.size() * model.feature_schema_.size()) {
        throw Error("malformed k-NN training store");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(fmt::format("malformed model file: {}", e.what()));
  }
  return model;
}

void FittedModel::Save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write '{}'", path));
  out << ToJson() << '\n';
}

FittedModel FittedModel::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return FromJson(ss.str());
}

QueryOracle::QueryOracle(std::shared_ptr<const FittedModel> model)
    : model_(std::move(model)) {
  if (!model_) throw Error("oracle needs a model");
}

Level QueryOracle::Query(std::span<const Level> features) const {
  ++queries_;
  return model_->Predict(features);
}

const Schema& QueryOracle::feature_schema() const { return model_->feature_schema(); }
const AttributeSpec& QueryOracle::target() const { return model_->target(); }

QueryOracle AsOracle(std::shared_ptr<const FittedModel> model) {
  return QueryOracle(std::move(model));
}

}  // namespace lomia
