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

// lomia: command-line driver for data generation, training, synthesis,
// attacks and the end-to-end experiment.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "lomia/attack.h"
#include "lomia/classifiers.h"
#include "lomia/data.h"
#include "lomia/experiment.h"
#include "lomia/features.h"
#include "lomia/metrics.h"
#include "lomia/surrogate.h"
#include "lomia/synthesizer.h"

namespace fs = std::filesystem;
using namespace lomia;

namespace {

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path));
  out << text;
}

struct DataArgs {
  std::string csv;
  std::string schema;
  void Add(CLI::App* app) {
    app->add_option("--data", csv, "input CSV")->required()->check(CLI::ExistingFile);
    app->add_option("--schema", schema, "schema YAML")->required()->check(CLI::ExistingFile);
  }
  Dataset Load() const { return LoadCsv(csv, LoadSchemaConfig(schema)); }
};

std::string TargetName(const Schema& schema) {
  auto t = schema.target_index();
  if (!t) throw Error("schema declares no target attribute");
  return schema.attribute(*t).name;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Label-only model inversion attacks against models trained on "
               "original or synthetic categorical data"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "sample the surrogate 2013/2015 study splits");
  std::string gen_config, gen_out, dump_spec;
  std::size_t n_train = 20000, n_exclusive = 3000;
  Seed gen_seed = 0;
  gen->add_option("--config", gen_config, "generator YAML (default spec if omitted)")
      ->check(CLI::ExistingFile);
  gen->add_option("--n-train", n_train, "individuals in inclusive 2013/2015");
  gen->add_option("--n-exclusive", n_exclusive, "individuals only in 2015");
  gen->add_option("--seed", gen_seed);
  gen->add_option("--out", gen_out, "output directory");
  gen->add_option("--dump-spec", dump_spec, "write the generator spec as YAML and exit");

  // select-features
  auto* sel = app.add_subcommand("select-features", "chi-squared SelectKBest");
  DataArgs sel_data;
  sel_data.Add(sel);
  std::size_t k = 8;
  std::string sel_out, sel_scores;
  sel->add_option("-k,--k", k, "number of non-sensitive features to keep");
  sel->add_option("--out", sel_out, "selected schema YAML")->required();
  sel->add_option("--scores", sel_scores, "per-feature chi2 CSV");

  // train
  auto* train = app.add_subcommand("train", "fit a classifier on the target attribute");
  DataArgs train_data;
  train_data.Add(train);
  ClassifierSpec spec;
  std::string algorithm = "random_forest", train_out;
  train->add_option("--algorithm", algorithm,
                    "majority|naive_bayes|decision_tree|random_forest|extra_trees|knn");
  train->add_option("--max-depth", spec.max_depth, "0 = unbounded");
  train->add_option("--min-leaf", spec.min_leaf);
  train->add_option("--n-trees", spec.n_trees);
  train->add_option("--features-per-split", spec.features_per_split, "0 = default");
  train->add_option("--k-neighbors", spec.k_neighbors);
  train->add_option("--laplace-alpha", spec.laplace_alpha);
  train->add_option("--seed", spec.seed);
  train->add_option("--out", train_out, "model JSON")->required();

  // predict
  auto* pred = app.add_subcommand("predict", "label and score every row");
  DataArgs pred_data;
  pred_data.Add(pred);
  std::string pred_model, pred_out;
  pred->add_option("--model", pred_model)->required()->check(CLI::ExistingFile);
  pred->add_option("--out", pred_out, "CSV of id,prediction,score (stdout if omitted)");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "AUC, MCC and F1-macro of a model on a dataset");
  DataArgs eval_data;
  eval_data.Add(eval);
  std::string eval_model;
  eval->add_option("--model", eval_model)->required()->check(CLI::ExistingFile);

  // synth
  auto* syn = app.add_subcommand("synth", "fit sequential CART and sample a synthetic dataset");
  DataArgs syn_data;
  syn_data.Add(syn);
  SynthesisConfig synthesis;
  std::size_t syn_n = 0;
  Seed syn_seed = 0;
  std::string syn_out, syn_report;
  syn->add_option("--n", syn_n, "rows to generate (default: input size)");
  syn->add_option("--min-leaf", synthesis.min_leaf);
  syn->add_option("--visiting-sequence", synthesis.visiting_sequence)->delimiter(',');
  syn->add_option("--seed", syn_seed);
  syn->add_option("--out", syn_out, "synthetic CSV")->required();
  syn->add_option("--report", syn_report, "per-attribute TV distance CSV");

  // marginals
  auto* marg = app.add_subcommand("marginals", "compute released per-attribute marginals");
  DataArgs marg_data;
  marg_data.Add(marg);
  std::string marg_out;
  marg->add_option("--out", marg_out, "marginals JSON")->required();

  // attack
  auto* atk = app.add_subcommand("attack", "infer a sensitive attribute of target records");
  DataArgs atk_data;
  atk_data.Add(atk);
  std::string atk_model, atk_marginals, atk_sensitive, atk_kind = "lomia_marginals",
                                                       atk_fallback = "sample", atk_out;
  Seed atk_seed = 0;
  bool allow_foreign = false;
  atk->add_option("--model", atk_model)->required()->check(CLI::ExistingFile);
  atk->add_option("--marginals", atk_marginals)->required()->check(CLI::ExistingFile);
  atk->add_option("--sensitive", atk_sensitive)->required();
  atk->add_option("--attack", atk_kind, "lomia_marginals|marginals_only");
  atk->add_option("--fallback", atk_fallback, "sample|mode");
  atk->add_option("--seed", atk_seed);
  atk->add_flag("--allow-foreign-marginals", allow_foreign,
                "accept marginals not computed from the model's training data");
  atk->add_option("--out", atk_out, "per-target predictions CSV");

  // report
  auto* rep = app.add_subcommand("report", "rebuild summary tables from attack_runs.csv/utility.csv");
  std::string rep_dir;
  rep->add_option("--dir", rep_dir, "reports directory")->required()->check(CLI::ExistingDirectory);

  // run-all
  auto* all = app.add_subcommand("run-all", "end-to-end experiment");
  std::string all_config, all_out = "lomia_run";
  std::optional<Seed> all_seed;
  all->add_option("--config", all_config, "experiment YAML")->check(CLI::ExistingFile);
  all->add_option("--seed", all_seed, "override root_seed");
  all->add_option("--out", all_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      GeneratorConfig g{DefaultGeneratorSpec(), {}};
      g.drift = DefaultDriftSpec(g.spec);
      if (!gen_config.empty()) g = LoadGeneratorConfig(gen_config);
      if (!dump_spec.empty()) {
        WriteFile(dump_spec, GeneratorConfigYaml(g.spec, g.drift));
        return 0;
      }
      if (gen_out.empty()) throw Error("--out is required");
      fs::create_directories(gen_out);
      const SplitBundle s = MakeStudySplits(g.spec, g.drift, n_train, n_exclusive, gen_seed);
      const fs::path o(gen_out);
      WriteCsv(s.inclusive_2013, (o / "inclusive_2013.csv").string());
      WriteCsv(s.inclusive_2015, (o / "inclusive_2015.csv").string());
      WriteCsv(s.exclusive_2015, (o / "exclusive_2015.csv").string());
      WriteFile((o / "schema.yaml").string(), SchemaConfigYaml(g.spec.schema()));
    } else if (*sel) {
      const Dataset d = sel_data.Load();
      const std::string target = TargetName(d.schema());
      std::vector<std::string> keep;
      for (std::size_t i : d.schema().IndicesWithRole(Role::kSensitive)) {
        keep.push_back(d.schema().attribute(i).name);
      }
      WriteFile(sel_out, SchemaConfigYaml(SelectKBest(d, target, k, keep)));
      if (!sel_scores.empty()) {
        std::string csv = "attribute,chi2,rank\n";
        for (const FeatureScore& s : RankFeatures(d, target, keep)) {
          csv += fmt::format("{},{:.6f},{}\n", s.name, s.chi2, s.rank);
        }
        WriteFile(sel_scores, csv);
      }
    } else if (*train) {
      spec.algorithm = ParseAlgorithm(algorithm);
      Fit(spec, train_data.Load()).Save(train_out);
    } else if (*pred) {
      const FittedModel model = FittedModel::Load(pred_model);
      const Dataset d = pred_data.Load();
      const std::vector<Level> labels = model.PredictAll(d);
      const std::vector<double> scores = model.ScoreAll(d);
      std::string csv = fmt::format("id,{},score\n", model.target().name);
      for (std::size_t r = 0; r < d.num_rows(); ++r) {
        csv += fmt::format("{},{},{:.6f}\n", d.id(r), model.target().levels[labels[r]], scores[r]);
      }
      if (pred_out.empty()) std::cout << csv;
      else WriteFile(pred_out, csv);
    } else if (*eval) {
      const FittedModel model = FittedModel::Load(eval_model);
      const Dataset d = eval_data.Load();
      const std::vector<Level> truth = d.Column(d.schema().Require(model.target().name));
      const std::vector<Level> labels = model.PredictAll(d);
      const std::vector<double> scores = model.ScoreAll(d);
      fmt::print("auc,mcc,f1_macro\n{:.6f},{:.6f},{:.6f}\n", Auc(truth, scores),
                 Mcc(truth, labels), F1Macro(truth, labels));
    } else if (*syn) {
      const Dataset d = syn_data.Load();
      synthesis.seed = DeriveSeed(syn_seed, "synth-fit");
      const SynthModel model = FitSequentialCart(d, synthesis);
      const Dataset synthetic = Generate(model, syn_n == 0 ? d.num_rows() : syn_n,
                                         DeriveSeed(syn_seed, "synth-generate"), 0);
      WriteCsv(synthetic, syn_out);
      std::string report = "attribute,tv_distance\n";
      for (const AttributeFidelity& f : CompareMarginals(d, synthetic)) {
        report += fmt::format("{},{:.6f}\n", f.name, f.tv_distance);
      }
      if (syn_report.empty()) std::cout << report;
      else WriteFile(syn_report, report);
    } else if (*marg) {
      SaveMarginals(ComputeMarginals(marg_data.Load()), marg_out);
    } else if (*atk) {
      auto model = std::make_shared<const FittedModel>(FittedModel::Load(atk_model));
      const ReleasedArtifacts release =
          Release(model, LoadMarginals(atk_marginals), allow_foreign);
      const Dataset d = atk_data.Load();
      const std::vector<TargetRecord> targets =
          MakeTargets(d, model->feature_schema(), model->target().name, atk_sensitive);
      const FallbackMode fallback = ParseFallbackMode(atk_fallback);
      AttackOutcome outcome;
      if (atk_kind == kAttackLomia) {
        const QueryOracle oracle = AsOracle(model);
        outcome = RunLomiaWithMarginals(oracle, targets, atk_sensitive, release.marginals,
                                        fallback, atk_seed);
      } else if (atk_kind == kAttackMarginalsOnly) {
        outcome = RunMarginalsOnly(targets, model->feature_schema(), atk_sensitive,
                                   release.marginals, fallback, atk_seed);
      } else {
        throw Error(fmt::format("unknown attack '{}'", atk_kind));
      }
      const AttributeSpec& attr =
          model->feature_schema().attribute(model->feature_schema().Require(atk_sensitive));
      if (!atk_out.empty()) {
        std::string csv = fmt::format("id,predicted_{},provenance\n", atk_sensitive);
        for (const AttackPrediction& p : outcome.predictions) {
          csv += fmt::format("{},{},{}\n", p.id, attr.levels[p.predicted],
                             ProvenanceName(p.provenance));
        }
        WriteFile(atk_out, csv);
      }
      fmt::print(
          "n_targets,n_case1_predicted,n_case1_correct,queries,precision,recall,f1_macro,"
          "accuracy\n{},{},{},{},{:.6f},{:.6f},{:.6f},{:.6f}\n",
          targets.size(), outcome.n_case1_predicted, outcome.n_case1_correct, outcome.queries,
          outcome.overall.precision, outcome.overall.recall, outcome.overall.f1_macro,
          outcome.overall.accuracy);
    } else if (*rep) {
      EmitReports(ReadReportBundle(rep_dir), rep_dir);
    } else if (*all) {
      ExperimentConfig config;
      if (!all_config.empty()) config = LoadExperimentConfig(all_config);
      if (all_seed) config.root_seed = *all_seed;
      RunAll(config, all_out);
      std::cout << fs::path(all_out) / "reports" / "summary.md" << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "lomia: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
