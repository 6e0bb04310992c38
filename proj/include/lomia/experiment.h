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

// End-to-end experiment: build the 2013/2015 splits, select features, fit
// the synthesizer, train every classifier on original and on synthetic 2013
// data, measure utility on real 2015 data, and attack the released model
// with LOMIA + Marginals and Marginals-Only over repeated target subsets.

#ifndef LOMIA_EXPERIMENT_H_
#define LOMIA_EXPERIMENT_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lomia/attack.h"
#include "lomia/classifiers.h"
#include "lomia/data.h"
#include "lomia/features.h"
#include "lomia/surrogate.h"
#include "lomia/synthesizer.h"

namespace lomia {

struct ExperimentConfig {
  Seed root_seed = 0;

  // Data source: the surrogate generator (default spec unless a generator
  // config is given) or, when all three CSVs are set, existing splits.
  std::string generator_config;
  std::size_t n_train = 20000;
  std::size_t n_exclusive = 3000;
  std::string schema_config;
  std::string inclusive_2013_csv;
  std::string inclusive_2015_csv;
  std::string exclusive_2015_csv;

  std::size_t k_features = 8;
  std::vector<ClassifierSpec> classifiers;  // empty = all six with defaults
  SynthesisConfig synthesis;

  Algorithm attacked = Algorithm::kRandomForest;
  std::vector<std::string> sensitive = {"gender", "age", "income"};
  std::size_t target_set_size = 2904;
  std::size_t repetitions = 10;
  std::vector<Seed> seeds;  // empty = derived from root_seed
  FallbackMode fallback = FallbackMode::kSample;
  // Release the original 2013 marginals alongside the synthetic-trained model
  // instead of the synthetic training data's marginals.
  bool release_original_marginals = false;
  // Reuse repetition 0's target subsets in every repetition.
  bool fix_target_subsets = false;

  // Throws Error on inconsistent settings.
  void Validate() const;
  std::vector<ClassifierSpec> EffectiveClassifiers() const;
  std::vector<Seed> EffectiveSeeds() const;
  // Canonical YAML of the effective configuration; hashed into the manifest.
  std::string ToYaml() const;
};

ExperimentConfig ParseExperimentConfig(std::string_view yaml_text);
ExperimentConfig LoadExperimentConfig(const std::string& path);

inline constexpr std::string_view kTrainedOnOriginal = "original";
inline constexpr std::string_view kTrainedOnSynthetic = "synthetic";

struct StudyData {
  Schema full_schema;
  SplitBundle full_splits;
  std::vector<FeatureScore> feature_scores;
  Schema schema;       // selected features + target + sensitive attributes
  SplitBundle splits;  // projected to `schema`
  Dataset synthetic_2013;
  std::vector<AttributeFidelity> fidelity;
};

StudyData PrepareStudy(const ExperimentConfig& config);

// Fitted classifiers keyed by (algorithm name, training data label).
using ModelKey = std::pair<std::string, std::string>;
using TrainedModels = std::map<ModelKey, std::shared_ptr<const FittedModel>>;

TrainedModels TrainModels(const ExperimentConfig& config, const StudyData& study);

// A model together with the marginals published next to it.
struct ReleasedArtifacts {
  std::shared_ptr<const FittedModel> model;
  MarginalSet marginals;
};

// Throws Error unless `marginals` were computed from the model's training
// data, or `allow_foreign_marginals` is set explicitly.
ReleasedArtifacts Release(std::shared_ptr<const FittedModel> model,
                          MarginalSet marginals,
                          bool allow_foreign_marginals = false);

struct UtilityRow {
  std::string classifier;
  std::string training;
  std::string test_set;
  double auc = 0;
  double mcc = 0;
  double f1_macro = 0;
};

std::vector<UtilityRow> RunUtilityExperiment(const ExperimentConfig& config,
                                             const StudyData& study,
                                             const TrainedModels& models);

inline constexpr std::string_view kAttackLomia = "lomia_marginals";
inline constexpr std::string_view kAttackMarginalsOnly = "marginals_only";

struct AttackRun {
  std::string resource;  // inclusive_2013 | inclusive_2015 | exclusive_2015
  std::string training;  // original | synthetic
  std::string sensitive;
  std::string attack;  // lomia_marginals | marginals_only
  std::size_t repetition = 0;
  Seed seed = 0;
  std::size_t n_targets = 0;
  std::size_t n_case1_predicted = 0;
  std::size_t n_case1_correct = 0;
  std::uint64_t queries = 0;
  AttackMetrics metrics;
};

// Releases for "original" and "synthetic" must both be present.
std::vector<AttackRun> RunAttackExperiment(
    const ExperimentConfig& config, const StudyData& study,
    const std::map<std::string, ReleasedArtifacts, std::less<>>& releases);

struct MeanStd {
  double mean = 0;
  double std = 0;  // population standard deviation
};
MeanStd Aggregate(std::span<const double> values);

struct AttackSummaryRow {
  std::string resource, training, sensitive, attack;
  std::size_t repetitions = 0;
  MeanStd n_case1_predicted, n_case1_correct;
  MeanStd precision, recall, f1_macro, accuracy;
};

std::vector<AttackSummaryRow> SummarizeAttacks(std::span<const AttackRun> runs);

struct ReportBundle {
  std::vector<UtilityRow> utility;
  std::vector<AttackRun> attack_runs;
  std::vector<AttackSummaryRow> attack_summary;
};

// utility.csv, case1_counts.csv, attack_metrics.csv, attack_runs.csv and
// summary.md under `dir`. Output is byte-stable for identical inputs.
void EmitReports(const ReportBundle& bundle, const std::string& dir);

// Rebuilds attack_metrics/case1 tables and summary.md from attack_runs.csv
// and utility.csv in `dir`.
ReportBundle ReadReportBundle(const std::string& dir);

// Whole pipeline into `dir` (data/, models/, reports/, manifest.json).
ReportBundle RunAll(const ExperimentConfig& config, const std::string& dir);

}  // namespace lomia

#endif  // LOMIA_EXPERIMENT_H_
