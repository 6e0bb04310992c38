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

#include "lomia/experiment.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <tuple>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <nlohmann/json.hpp>

#include "lomia/metrics.h"

namespace lomia {
namespace {

namespace fs = std::filesystem;

constexpr std::int64_t kSyntheticIdBase = 1000000000;
constexpr std::string_view kResources[] = {"inclusive_2013", "inclusive_2015",
                                           "exclusive_2015"};
constexpr std::string_view kTrainings[] = {kTrainedOnOriginal, kTrainedOnSynthetic};
constexpr std::string_view kAttacks[] = {kAttackLomia, kAttackMarginalsOnly};
constexpr std::string_view kTestCombined = "inclusive_exclusive_2015";
constexpr std::string_view kTestExclusive = "exclusive_2015";

std::size_t IndexIn(std::span<const std::string_view> list, std::string_view value) {
  return static_cast<std::size_t>(std::find(list.begin(), list.end(), value) - list.begin());
}

std::string Num(double v) {
  // Avoid "-0.000000" so reruns and platforms agree textually.
  std::string s = fmt::format("{:.6f}", v);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << text;
}

std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> ReadCsvTable(const fs::path& path,
                                                   const std::string& header) {
  std::istringstream in(ReadText(path));
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw Error(fmt::format("'{}': unexpected header", path.string()));
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    rows.push_back(std::move(fields));
  }
  return rows;
}

ClassifierSpec ParseClassifier(const YAML::Node& node) {
  ClassifierSpec spec;
  spec.algorithm = ParseAlgorithm(node["algorithm"].as<std::string>());
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (key == "algorithm") continue;
    if (key == "max_depth") spec.max_depth = kv.second.as<std::size_t>();
    else if (key == "min_leaf") spec.min_leaf = kv.second.as<std::size_t>();
    else if (key == "n_trees") spec.n_trees = kv.second.as<std::size_t>();
    else if (key == "features_per_split") spec.features_per_split = kv.second.as<std::size_t>();
    else if (key == "k_neighbors") spec.k_neighbors = kv.second.as<std::size_t>();
    else if (key == "laplace_alpha") spec.laplace_alpha = kv.second.as<double>();
    else if (key == "seed") spec.seed = kv.second.as<Seed>();
    else throw Error(fmt::format("unknown classifier key '{}'", key));
  }
  return spec;
}

void CheckKeys(const YAML::Node& node, std::initializer_list<std::string_view> allowed,
               std::string_view section) {
  if (!node) return;
  if (!node.IsMap()) throw Error(fmt::format("config section '{}' must be a map", section));
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(fmt::format("unknown config key '{}' in '{}'", key, section));
    }
  }
}

Dataset SubsetFor(const Dataset& data, std::size_t size, Seed seed) {
  return SampleRows(data, std::min(size, data.num_rows()), seed);
}

}  // namespace

void ExperimentConfig::Validate() const {
  if (repetitions == 0) throw Error("repetitions must be >= 1");
  if (!seeds.empty() && seeds.size() != repetitions) {
    throw Error(fmt::format("{} seeds given for {} repetitions", seeds.size(), repetitions));
  }
  if (target_set_size == 0) throw Error("target_set_size must be >= 1");
  if (k_features == 0) throw Error("k_features must be >= 1");
  if (sensitive.empty()) throw Error("at least one sensitive attribute must be attacked");
  const bool csv = !inclusive_2013_csv.empty() || !inclusive_2015_csv.empty() ||
                   !exclusive_2015_csv.empty();
  if (csv) {
    if (inclusive_2013_csv.empty() || inclusive_2015_csv.empty() ||
        exclusive_2015_csv.empty() || schema_config.empty()) {
      throw Error("CSV input needs schema and all three split files");
    }
  } else {
    if (n_train == 0 || n_exclusive == 0) throw Error("split sizes must be >= 1");
    if (target_set_size > n_train || target_set_size > n_exclusive) {
      throw Error(fmt::format("target_set_size {} exceeds the available individuals",
                              target_set_size));
    }
  }
  if (synthesis.min_leaf == 0) throw Error("synthesis min_leaf must be >= 1");
}

std::vector<ClassifierSpec> ExperimentConfig::EffectiveClassifiers() const {
  std::vector<ClassifierSpec> specs = classifiers;
  if (specs.empty()) {
    for (Algorithm a : {Algorithm::kMajority, Algorithm::kNaiveBayes, Algorithm::kRandomForest,
                        Algorithm::kDecisionTree, Algorithm::kExtraTrees, Algorithm::kKnn}) {
      ClassifierSpec spec;
      spec.algorithm = a;
      specs.push_back(spec);
    }
  }
  if (std::none_of(specs.begin(), specs.end(),
                   [&](const ClassifierSpec& s) { return s.algorithm == attacked; })) {
    ClassifierSpec spec;
    spec.algorithm = attacked;
    specs.push_back(spec);
  }
  for (ClassifierSpec& spec : specs) {
    spec.seed = DeriveSeed(DeriveSeed(root_seed, fmt::format("classifier:{}",
                                                             AlgorithmName(spec.algorithm))),
                           spec.seed);
  }
  return specs;
}

std::vector<Seed> ExperimentConfig::EffectiveSeeds() const {
  if (!seeds.empty()) return seeds;
  std::vector<Seed> out;
  const Seed base = DeriveSeed(root_seed, "repetition");
  for (std::size_t r = 0; r < repetitions; ++r) out.push_back(DeriveSeed(base, r));
  return out;
}

std::string ExperimentConfig::ToYaml() const {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "root_seed" << YAML::Value << root_seed;
  out << YAML::Key << "data" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "generator" << YAML::Value << generator_config;
  out << YAML::Key << "n_train" << YAML::Value << n_train;
  out << YAML::Key << "n_exclusive" << YAML::Value << n_exclusive;
  out << YAML::Key << "schema" << YAML::Value << schema_config;
  out << YAML::Key << "inclusive_2013" << YAML::Value << inclusive_2013_csv;
  out << YAML::Key << "inclusive_2015" << YAML::Value << inclusive_2015_csv;
  out << YAML::Key << "exclusive_2015" << YAML::Value << exclusive_2015_csv;
  out << YAML::EndMap;
  out << YAML::Key << "features" << YAML::Value << YAML::BeginMap << YAML::Key << "k"
      << YAML::Value << k_features << YAML::EndMap;
  out << YAML::Key << "classifiers" << YAML::Value << YAML::BeginSeq;
  for (const ClassifierSpec& s : classifiers) {
    out << YAML::BeginMap;
    out << YAML::Key << "algorithm" << YAML::Value << std::string(AlgorithmName(s.algorithm));
    out << YAML::Key << "max_depth" << YAML::Value << s.max_depth;
    out << YAML::Key << "min_leaf" << YAML::Value << s.min_leaf;
    out << YAML::Key << "n_trees" << YAML::Value << s.n_trees;
    out << YAML::Key << "features_per_split" << YAML::Value << s.features_per_split;
    out << YAML::Key << "k_neighbors" << YAML::Value << s.k_neighbors;
    out << YAML::Key << "laplace_alpha" << YAML::Value << s.laplace_alpha;
    out << YAML::Key << "seed" << YAML::Value << s.seed;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "synthesis" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "min_leaf" << YAML::Value << synthesis.min_leaf;
  out << YAML::Key << "visiting_sequence" << YAML::Value << YAML::Flow
      << synthesis.visiting_sequence;
  out << YAML::EndMap;
  out << YAML::Key << "attack" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "classifier" << YAML::Value << std::string(AlgorithmName(attacked));
  out << YAML::Key << "sensitive" << YAML::Value << YAML::Flow << sensitive;
  out << YAML::Key << "target_set_size" << YAML::Value << target_set_size;
  out << YAML::Key << "repetitions" << YAML::Value << repetitions;
  out << YAML::Key << "seeds" << YAML::Value << YAML::Flow << seeds;
  out << YAML::Key << "fallback" << YAML::Value << std::string(FallbackModeName(fallback));
  out << YAML::Key << "release_original_marginals" << YAML::Value
      << release_original_marginals;
  out << YAML::Key << "fix_target_subsets" << YAML::Value << fix_target_subsets;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

ExperimentConfig ParseExperimentConfig(std::string_view yaml_text) {
  ExperimentConfig config;
  try {
    const YAML::Node root = YAML::Load(std::string(yaml_text));
    if (!root || root.IsNull()) return config;
    CheckKeys(root, {"root_seed", "data", "features", "classifiers", "synthesis", "attack"},
              "<root>");
    if (root["root_seed"]) config.root_seed = root["root_seed"].as<Seed>();
    if (const YAML::Node d = root["data"]) {
      CheckKeys(d, {"generator", "n_train", "n_exclusive", "schema", "inclusive_2013",
                    "inclusive_2015", "exclusive_2015"},
                "data");
      if (d["generator"]) config.generator_config = d["generator"].as<std::string>();
      if (d["n_train"]) config.n_train = d["n_train"].as<std::size_t>();
      if (d["n_exclusive"]) config.n_exclusive = d["n_exclusive"].as<std::size_t>();
      if (d["schema"]) config.schema_config = d["schema"].as<std::string>();
      if (d["inclusive_2013"]) config.inclusive_2013_csv = d["inclusive_2013"].as<std::string>();
      if (d["inclusive_2015"]) config.inclusive_2015_csv = d["inclusive_2015"].as<std::string>();
      if (d["exclusive_2015"]) config.exclusive_2015_csv = d["exclusive_2015"].as<std::string>();
    }
    if (const YAML::Node f = root["features"]) {
      CheckKeys(f, {"k"}, "features");
      if (f["k"]) config.k_features = f["k"].as<std::size_t>();
    }
    if (const YAML::Node c = root["classifiers"]) {
      for (const YAML::Node& node : c) config.classifiers.push_back(ParseClassifier(node));
    }
    if (const YAML::Node s = root["synthesis"]) {
      CheckKeys(s, {"min_leaf", "visiting_sequence"}, "synthesis");
      if (s["min_leaf"]) config.synthesis.min_leaf = s["min_leaf"].as<std::size_t>();
      if (s["visiting_sequence"]) {
        config.synthesis.visiting_sequence = s["visiting_sequence"].as<std::vector<std::string>>();
      }
    }
    if (const YAML::Node a = root["attack"]) {
      CheckKeys(a, {"classifier", "sensitive", "target_set_size", "repetitions", "seeds",
                    "fallback", "release_original_marginals", "fix_target_subsets"},
                "attack");
      if (a["classifier"]) config.attacked = ParseAlgorithm(a["classifier"].as<std::string>());
      if (a["sensitive"]) config.sensitive = a["sensitive"].as<std::vector<std::string>>();
      if (a["target_set_size"]) config.target_set_size = a["target_set_size"].as<std::size_t>();
      if (a["repetitions"]) config.repetitions = a["repetitions"].as<std::size_t>();
      if (a["seeds"]) config.seeds = a["seeds"].as<std::vector<Seed>>();
      if (a["fallback"]) config.fallback = ParseFallbackMode(a["fallback"].as<std::string>());
      if (a["release_original_marginals"]) {
        config.release_original_marginals = a["release_original_marginals"].as<bool>();
      }
      if (a["fix_target_subsets"]) config.fix_target_subsets = a["fix_target_subsets"].as<bool>();
    }
  } catch (const YAML::Exception& e) {
    throw Error(fmt::format("experiment config: {}", e.what()));
  }
  config.Validate();
  return config;
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  return ParseExperimentConfig(ReadText(path));
}

StudyData PrepareStudy(const ExperimentConfig& config) {
  config.Validate();
  StudyData study;
  if (!config.inclusive_2013_csv.empty()) {
    study.full_schema = LoadSchemaConfig(config.schema_config);
    study.full_splits.inclusive_2013 = LoadCsv(config.inclusive_2013_csv, study.full_schema);
    study.full_splits.inclusive_2015 = LoadCsv(config.inclusive_2015_csv, study.full_schema);
    study.full_splits.exclusive_2015 = LoadCsv(config.exclusive_2015_csv, study.full_schema);
  } else {
    GeneratorConfig gen{DefaultGeneratorSpec(), {}};
    gen.drift = DefaultDriftSpec(gen.spec);
    if (!config.generator_config.empty()) gen = LoadGeneratorConfig(config.generator_config);
    study.full_schema = gen.spec.schema();
    study.full_splits = MakeStudySplits(gen.spec, gen.drift, config.n_train,
                                        config.n_exclusive, DeriveSeed(config.root_seed, "splits"));
  }
  const Schema& schema = study.full_schema;
  schema.ValidateStudyRoles();
  for (const std::string& s : config.sensitive) {
    if (schema.attribute(schema.Require(s)).role != Role::kSensitive) {
      throw Error(fmt::format("'{}' is not declared sensitive", s));
    }
  }
  for (const Dataset* d : {&study.full_splits.inclusive_2013, &study.full_splits.inclusive_2015,
                           &study.full_splits.exclusive_2015}) {
    if (d->num_rows() < config.target_set_size) {
      throw Error(fmt::format("target_set_size {} exceeds a split of {} individuals",
                              config.target_set_size, d->num_rows()));
    }
  }
  const std::string target = schema.attribute(*schema.target_index()).name;
  std::vector<std::string> keep;
  for (std::size_t i : schema.IndicesWithRole(Role::kSensitive)) {
    keep.push_back(schema.attribute(i).name);
  }
  study.feature_scores = RankFeatures(study.full_splits.inclusive_2013, target, keep);
  study.schema = SelectKBest(study.full_splits.inclusive_2013, target, config.k_features, keep);
  study.splits.inclusive_2013 = ProjectToSchema(study.full_splits.inclusive_2013, study.schema);
  study.splits.inclusive_2015 = ProjectToSchema(study.full_splits.inclusive_2015, study.schema);
  study.splits.exclusive_2015 = ProjectToSchema(study.full_splits.exclusive_2015, study.schema);

  SynthesisConfig synthesis = config.synthesis;
  synthesis.seed = DeriveSeed(config.root_seed, "synth-fit");
  const SynthModel synth = FitSequentialCart(study.splits.inclusive_2013, synthesis);
  study.synthetic_2013 = Generate(synth, study.splits.inclusive_2013.num_rows(),
                                  DeriveSeed(config.root_seed, "synth-generate"),
                                  kSyntheticIdBase);
  study.fidelity = CompareMarginals(study.splits.inclusive_2013, study.synthetic_2013);
  return study;
}

TrainedModels TrainModels(const ExperimentConfig& config, const StudyData& study) {
  TrainedModels models;
  for (const ClassifierSpec& spec : config.EffectiveClassifiers()) {
    const std::string name(AlgorithmName(spec.algorithm));
    models[{name, std::string(kTrainedOnOriginal)}] =
        std::make_shared<const FittedModel>(Fit(spec, study.splits.inclusive_2013));
    models[{name, std::string(kTrainedOnSynthetic)}] =
        std::make_shared<const FittedModel>(Fit(spec, study.synthetic_2013));
  }
  return models;
}

ReleasedArtifacts Release(std::shared_ptr<const FittedModel> model, MarginalSet marginals,
                          bool allow_foreign_marginals) {
  if (!model) throw Error("release needs a model");
  if (!allow_foreign_marginals &&
      marginals.source_fingerprint() != model->training_fingerprint()) {
    throw Error(
        "released marginals were not computed from the model's training data "
        "(set release_original_marginals to publish them anyway)");
  }
  return {std::move(model), std::move(marginals)};
}

std::vector<UtilityRow> RunUtilityExperiment(const ExperimentConfig& config,
                                             const StudyData& study,
                                             const TrainedModels& models) {
  const Dataset combined = ConcatRows(study.splits.inclusive_2015, study.splits.exclusive_2015);
  const std::size_t t = *study.schema.target_index();
  const std::vector<Level> truth = combined.Column(t);
  const std::size_t exclusive_begin = study.splits.inclusive_2015.num_rows();
  std::span<const Level> truth_all(truth);
  std::span<const Level> truth_excl = truth_all.subspan(exclusive_begin);

  std::vector<UtilityRow> rows;
  for (const ClassifierSpec& spec : config.EffectiveClassifiers()) {
    const std::string name(AlgorithmName(spec.algorithm));
    for (std::string_view training : kTrainings) {
      const auto it = models.find({name, std::string(training)});
      if (it == models.end()) throw Error(fmt::format("missing model {}/{}", name, training));
      const std::vector<double> scores = it->second->ScoreAll(combined);
      const std::vector<Level> preds = it->second->PredictAll(combined);
      std::span<const double> scores_all(scores);
      std::span<const Level> preds_all(preds);
      rows.push_back({name, std::string(training), std::string(kTestCombined),
                      Auc(truth_all, scores_all), Mcc(truth_all, preds_all),
                      F1Macro(truth_all, preds_all)});
      rows.push_back({name, std::string(training), std::string(kTestExclusive),
                      Auc(truth_excl, scores_all.subspan(exclusive_begin)),
                      Mcc(truth_excl, preds_all.subspan(exclusive_begin)),
                      F1Macro(truth_excl, preds_all.subspan(exclusive_begin))});
    }
  }
  return rows;
}

std::vector<AttackRun> RunAttackExperiment(
    const ExperimentConfig& config, const StudyData& study,
    const std::map<std::string, ReleasedArtifacts, std::less<>>& releases) {
  for (std::string_view training : kTrainings) {
    if (!releases.contains(training)) {
      throw Error(fmt::format("missing released artifacts for '{}' model", training));
    }
  }
  const std::string target = study.schema.attribute(*study.schema.target_index()).name;
  const std::vector<Seed> seeds = config.EffectiveSeeds();
  const Dataset* resources[] = {&study.splits.inclusive_2013, &study.splits.inclusive_2015,
                                &study.splits.exclusive_2015};
  std::vector<AttackRun> runs;
  for (std::size_t rep = 0; rep < seeds.size(); ++rep) {
    const Seed rep_seed = seeds[rep];
    const Seed subset_seed = config.fix_target_subsets ? seeds.front() : rep_seed;
    const Dataset subsets[] = {
        SubsetFor(*resources[0], config.target_set_size, DeriveSeed(subset_seed, "inclusive")),
        SubsetFor(*resources[1], config.target_set_size, DeriveSeed(subset_seed, "inclusive")),
        SubsetFor(*resources[2], config.target_set_size, DeriveSeed(subset_seed, "exclusive"))};
    for (std::size_t res = 0; res < std::size(kResources); ++res) {
      for (std::string_view training : kTrainings) {
        const ReleasedArtifacts& release = releases.find(training)->second;
        const Schema& features = release.model->feature_schema();
        for (const std::string& sensitive : config.sensitive) {
          const std::vector<TargetRecord> targets =
              MakeTargets(subsets[res], features, target, sensitive);
          const Seed fallback_seed = DeriveSeed(rep_seed, "fallback:" + sensitive);
          const QueryOracle oracle = AsOracle(release.model);
          const AttackOutcome lomia = RunLomiaWithMarginals(
              oracle, targets, sensitive, release.marginals, config.fallback, fallback_seed);
          const AttackOutcome marginals_only = RunMarginalsOnly(
              targets, features, sensitive, release.marginals, config.fallback, fallback_seed);
          for (const AttackOutcome* o : {&lomia, &marginals_only}) {
            AttackRun run;
            run.resource = std::string(kResources[res]);
            run.training = std::string(training);
            run.sensitive = sensitive;
            run.attack = std::string(o == &lomia ? kAttackLomia : kAttackMarginalsOnly);
            run.repetition = rep;
            run.seed = rep_seed;
            run.n_targets = targets.size();
            run.n_case1_predicted = o->n_case1_predicted;
            run.n_case1_correct = o->n_case1_correct;
            run.queries = o->queries;
            run.metrics = o->overall;
            runs.push_back(std::move(run));
          }
        }
      }
    }
  }
  auto key = [&](const AttackRun& r) {
    const auto s = static_cast<std::size_t>(
        std::find(config.sensitive.begin(), config.sensitive.end(), r.sensitive) -
        config.sensitive.begin());
    return std::make_tuple(IndexIn(kResources, r.resource), IndexIn(kTrainings, r.training), s,
                           IndexIn(kAttacks, r.attack), r.repetition);
  };
  std::stable_sort(runs.begin(), runs.end(),
                   [&](const AttackRun& a, const AttackRun& b) { return key(a) < key(b); });
  return runs;
}

MeanStd Aggregate(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  double sum = 0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  double sq = 0;
  for (double v : values) sq += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(sq / static_cast<double>(values.size()));
  return out;
}

std::vector<AttackSummaryRow> SummarizeAttacks(std::span<const AttackRun> runs) {
  std::vector<AttackSummaryRow> out;
  std::vector<std::vector<const AttackRun*>> groups;
  for (const AttackRun& r : runs) {
    auto it = std::find_if(out.begin(), out.end(), [&](const AttackSummaryRow& s) {
      return s.resource == r.resource && s.training == r.training &&
             s.sensitive == r.sensitive && s.attack == r.attack;
    });
    if (it == out.end()) {
      AttackSummaryRow row;
      row.resource = r.resource;
      row.training = r.training;
      row.sensitive = r.sensitive;
      row.attack = r.attack;
      out.push_back(std::move(row));
      groups.emplace_back();
      it = out.end() - 1;
    }
    groups[static_cast<std::size_t>(it - out.begin())].push_back(&r);
  }
  for (std::size_t g = 0; g < out.size(); ++g) {
    auto collect = [&](auto field) {
      std::vector<double> v;
      for (const AttackRun* r : groups[g]) v.push_back(field(*r));
      return Aggregate(v);
    };
    AttackSummaryRow& s = out[g];
    s.repetitions = groups[g].size();
    s.n_case1_predicted = collect([](const AttackRun& r) { return double(r.n_case1_predicted); });
    s.n_case1_correct = collect([](const AttackRun& r) { return double(r.n_case1_correct); });
    s.precision = collect([](const AttackRun& r) { return r.metrics.precision; });
    s.recall = collect([](const AttackRun& r) { return r.metrics.recall; });
    s.f1_macro = collect([](const AttackRun& r) { return r.metrics.f1_macro; });
    s.accuracy = collect([](const AttackRun& r) { return r.metrics.accuracy; });
  }
  return out;
}

namespace {

constexpr char kUtilityHeader[] = "classifier,training,test_set,auc,mcc,f1_macro";
constexpr char kRunsHeader[] =
    "resource,training,sensitive,attack,repetition,seed,n_targets,n_case1_predicted,"
    "n_case1_correct,queries,precision,recall,f1_macro,accuracy";

std::string SummaryMarkdown(const ReportBundle& bundle) {
  std::string md = "# Experiment summary\n\n## Utility (train on 2013, test on real 2015)\n\n";
  md += "| classifier | training | test set | AUC | MCC | F1-macro |\n|---|---|---|---|---|---|\n";
  for (const UtilityRow& r : bundle.utility) {
    md += fmt::format("| {} | {} | {} | {} | {} | {} |\n", r.classifier, r.training,
                      r.test_set, Num(r.auc), Num(r.mcc), Num(r.f1_macro));
  }
  md += "\n## Case-1 predictions (mean ± std over repetitions)\n\n";
  md += "| resource | training | sensitive | #predicted | #correct |\n|---|---|---|---|---|\n";
  for (const AttackSummaryRow& s : bundle.attack_summary) {
    if (s.attack != kAttackLomia) continue;
    md += fmt::format("| {} | {} | {} | {} ± {} | {} ± {} |\n", s.resource, s.training,
                      s.sensitive, Num(s.n_case1_predicted.mean), Num(s.n_case1_predicted.std),
                      Num(s.n_case1_correct.mean), Num(s.n_case1_correct.std));
  }
  md += "\n## Attack metrics (mean ± std over repetitions)\n\n";
  md += "| resource | training | sensitive | attack | precision | recall | F1-macro |\n"
        "|---|---|---|---|---|---|---|\n";
  for (const AttackSummaryRow& s : bundle.attack_summary) {
    md += fmt::format("| {} | {} | {} | {} | {} ± {} | {} ± {} | {} ± {} |\n", s.resource,
                      s.training, s.sensitive, s.attack, Num(s.precision.mean),
                      Num(s.precision.std), Num(s.recall.mean), Num(s.recall.std),
                      Num(s.f1_macro.mean), Num(s.f1_macro.std));
  }
  return md;
}

}  // namespace

void EmitReports(const ReportBundle& bundle, const std::string& dir) {
  fs::create_directories(dir);
  const fs::path root(dir);

  std::string utility = std::string(kUtilityHeader) + "\n";
  for (const UtilityRow& r : bundle.utility) {
    utility += fmt::format("{},{},{},{},{},{}\n", r.classifier, r.training, r.test_set,
                           Num(r.auc), Num(r.mcc), Num(r.f1_macro));
  }
  WriteText(root / "utility.csv", utility);

  std::string runs = std::string(kRunsHeader) + "\n";
  for (const AttackRun& r : bundle.attack_runs) {
    runs += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.resource, r.training,
                        r.sensitive, r.attack, r.repetition, r.seed, r.n_targets,
                        r.n_case1_predicted, r.n_case1_correct, r.queries,
                        Num(r.metrics.precision), Num(r.metrics.recall),
                        Num(r.metrics.f1_macro), Num(r.metrics.accuracy));
  }
  WriteText(root / "attack_runs.csv", runs);

  std::string metrics =
      "resource,training,sensitive,attack,repetitions,precision_mean,precision_std,"
      "recall_mean,recall_std,f1_macro_mean,f1_macro_std,accuracy_mean,accuracy_std\n";
  std::string case1 =
      "resource,training,sensitive,repetitions,n_case1_predicted_mean,"
      "n_case1_predicted_std,n_case1_correct_mean,n_case1_correct_std\n";
  for (const AttackSummaryRow& s : bundle.attack_summary) {
    metrics += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", s.resource, s.training,
                           s.sensitive, s.attack, s.repetitions, Num(s.precision.mean),
                           Num(s.precision.std), Num(s.recall.mean), Num(s.recall.std),
                           Num(s.f1_macro.mean), Num(s.f1_macro.std), Num(s.accuracy.mean),
                           Num(s.accuracy.std));
    if (s.attack == kAttackLomia) {
      case1 += fmt::format("{},{},{},{},{},{},{},{}\n", s.resource, s.training, s.sensitive,
                           s.repetitions, Num(s.n_case1_predicted.mean),
                           Num(s.n_case1_predicted.std), Num(s.n_case1_correct.mean),
                           Num(s.n_case1_correct.std));
    }
  }
  WriteText(root / "attack_metrics.csv", metrics);
  WriteText(root / "case1_counts.csv", case1);
  WriteText(root / "summary.md", SummaryMarkdown(bundle));
}

ReportBundle ReadReportBundle(const std::string& dir) {
  const fs::path root(dir);
  ReportBundle bundle;
  for (const auto& f : ReadCsvTable(root / "utility.csv", kUtilityHeader)) {
    if (f.size() != 6) throw Error("utility.csv: malformed row");
    bundle.utility.push_back({f[0], f[1], f[2], std::stod(f[3]), std::stod(f[4]),
                              std::stod(f[5])});
  }
  for (const auto& f : ReadCsvTable(root / "attack_runs.csv", kRunsHeader)) {
    if (f.size() != 14) throw Error("attack_runs.csv: malformed row");
    AttackRun r;
    r.resource = f[0];
    r.training = f[1];
    r.sensitive = f[2];
    r.attack = f[3];
    r.repetition = std::stoull(f[4]);
    r.seed = std::stoull(f[5]);
    r.n_targets = std::stoull(f[6]);
    r.n_case1_predicted = std::stoull(f[7]);
    r.n_case1_correct = std::stoull(f[8]);
    r.queries = std::stoull(f[9]);
    r.metrics = {r.n_targets, std::stod(f[10]), std::stod(f[11]), std::stod(f[12]),
                 std::stod(f[13])};
    bundle.attack_runs.push_back(std::move(r));
  }
  bundle.attack_summary = SummarizeAttacks(bundle.attack_runs);
  return bundle;
}

ReportBundle RunAll(const ExperimentConfig& config, const std::string& dir) {
  config.Validate();
  const fs::path root(dir);
  fs::create_directories(root / "data");
  fs::create_directories(root / "models");
  fs::create_directories(root / "reports");
  std::vector<std::string> files;
  auto note = [&](const fs::path& p) { files.push_back(fs::relative(p, root).generic_string()); };

  const StudyData study = PrepareStudy(config);
  const std::pair<const char*, const Dataset*> data_files[] = {
      {"inclusive_2013.csv", &study.full_splits.inclusive_2013},
      {"inclusive_2015.csv", &study.full_splits.inclusive_2015},
      {"exclusive_2015.csv", &study.full_splits.exclusive_2015},
      {"synthetic_2013.csv", &study.synthetic_2013}};
  for (const auto& [name, data] : data_files) {
    WriteCsv(*data, (root / "data" / name).string());
    note(root / "data" / name);
  }
  WriteText(root / "data" / "schema.yaml", SchemaConfigYaml(study.full_schema));
  WriteText(root / "data" / "selected_schema.yaml", SchemaConfigYaml(study.schema));
  std::string scores = "attribute,chi2,rank\n";
  for (const FeatureScore& s : study.feature_scores) {
    scores += fmt::format("{},{},{}\n", s.name, Num(s.chi2), s.rank);
  }
  WriteText(root / "data" / "feature_scores.csv", scores);
  std::string fidelity = "attribute,tv_distance\n";
  for (const AttributeFidelity& f : study.fidelity) {
    fidelity += fmt::format("{},{}\n", f.name, Num(f.tv_distance));
  }
  WriteText(root / "reports" / "synthesis_fidelity.csv", fidelity);
  for (const char* name : {"schema.yaml", "selected_schema.yaml", "feature_scores.csv"}) {
    note(root / "data" / name);
  }

  const TrainedModels models = TrainModels(config, study);
  for (const auto& [key, model] : models) {
    const fs::path p = root / "models" / fmt::format("{}_{}.json", key.first, key.second);
    model->Save(p.string());
    note(p);
  }
  const MarginalSet original_marginals = ComputeMarginals(study.splits.inclusive_2013);
  const MarginalSet synthetic_marginals = ComputeMarginals(study.synthetic_2013);
  SaveMarginals(original_marginals, (root / "models" / "marginals_original.json").string());
  SaveMarginals(synthetic_marginals, (root / "models" / "marginals_synthetic.json").string());
  note(root / "models" / "marginals_original.json");
  note(root / "models" / "marginals_synthetic.json");

  const std::string attacked(AlgorithmName(config.attacked));
  std::map<std::string, ReleasedArtifacts, std::less<>> releases;
  releases.emplace(std::string(kTrainedOnOriginal),
                   Release(models.at({attacked, std::string(kTrainedOnOriginal)}),
                           original_marginals));
  releases.emplace(std::string(kTrainedOnSynthetic),
                   Release(models.at({attacked, std::string(kTrainedOnSynthetic)}),
                           config.release_original_marginals ? original_marginals
                                                             : synthetic_marginals,
                           config.release_original_marginals));

  ReportBundle bundle;
  bundle.utility = RunUtilityExperiment(config, study, models);
  bundle.attack_runs = RunAttackExperiment(config, study, releases);
  bundle.attack_summary = SummarizeAttacks(bundle.attack_runs);
  EmitReports(bundle, (root / "reports").string());
  for (const char* name : {"utility.csv", "attack_runs.csv", "attack_metrics.csv",
                           "case1_counts.csv", "summary.md", "synthesis_fidelity.csv"}) {
    note(root / "reports" / name);
  }
  std::sort(files.begin(), files.end());

  const std::string config_yaml = config.ToYaml();
  nlohmann::ordered_json manifest;
  manifest["format"] = "lomia-run";
  manifest["version"] = 1;
  manifest["config_hash"] = HexU64(Fnv1a(config_yaml));
  manifest["root_seed"] = config.root_seed;
  manifest["stage_seeds"] = {{"splits", DeriveSeed(config.root_seed, "splits")},
                             {"synth_fit", DeriveSeed(config.root_seed, "synth-fit")},
                             {"synth_generate", DeriveSeed(config.root_seed, "synth-generate")}};
  nlohmann::ordered_json classifier_seeds;
  for (const ClassifierSpec& spec : config.EffectiveClassifiers()) {
    classifier_seeds[std::string(AlgorithmName(spec.algorithm))] = spec.seed;
  }
  manifest["classifier_seeds"] = classifier_seeds;
  manifest["repetition_seeds"] = config.EffectiveSeeds();
  manifest["config"] = config_yaml;
  manifest["files"] = files;
  WriteText(root / "manifest.json", manifest.dump(2) + "\n");
  return bundle;
}

}  // namespace lomia
