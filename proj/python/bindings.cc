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

#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lomia/attack.h"
#include "lomia/classifiers.h"
#include "lomia/data.h"
#include "lomia/experiment.h"
#include "lomia/features.h"
#include "lomia/metrics.h"
#include "lomia/surrogate.h"
#include "lomia/synthesizer.h"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace lomia;

namespace {

std::vector<Level> ToLevels(const std::vector<int>& record) {
  std::vector<Level> out;
  out.reserve(record.size());
  for (int v : record) out.push_back(v < 0 ? kUnknownLevel : static_cast<Level>(v));
  return out;
}

py::array_t<std::uint16_t> CellsArray(const Dataset& d) {
  py::array_t<std::uint16_t> out({d.num_rows(), d.num_columns()});
  std::copy(d.cells().begin(), d.cells().end(), out.mutable_data());
  return out;
}

ClassifierSpec MakeSpec(const std::string& algorithm, std::size_t max_depth,
                        std::size_t min_leaf, std::size_t n_trees,
                        std::size_t features_per_split, std::size_t k_neighbors,
                        double laplace_alpha, Seed seed) {
  ClassifierSpec spec;
  spec.algorithm = ParseAlgorithm(algorithm);
  spec.max_depth = max_depth;
  spec.min_leaf = min_leaf;
  spec.n_trees = n_trees;
  spec.features_per_split = features_per_split;
  spec.k_neighbors = k_neighbors;
  spec.laplace_alpha = laplace_alpha;
  spec.seed = seed;
  return spec;
}

py::dict MetricsDict(const AttackMetrics& m) {
  return py::dict("n"_a = m.n, "precision"_a = m.precision, "recall"_a = m.recall,
                  "f1_macro"_a = m.f1_macro, "accuracy"_a = m.accuracy);
}

}  // namespace

PYBIND11_MODULE(_lomia, m) {
  m.doc() = "Label-only model inversion attacks on original vs synthetic training data";
  py::register_exception<Error>(m, "LomiaError", PyExc_ValueError);
  m.attr("UNKNOWN") = -1;

  py::class_<Schema>(m, "Schema")
      .def_static("from_yaml", &ParseSchemaConfig, "text"_a)
      .def_static("load", &LoadSchemaConfig, "path"_a)
      .def("to_yaml", &SchemaConfigYaml)
      .def("names", &Schema::names)
      .def("__len__", &Schema::size)
      .def("levels", [](const Schema& s, const std::string& name) {
        return s.attribute(s.Require(name)).levels;
      })
      .def("role", [](const Schema& s, const std::string& name) {
        return std::string(RoleName(s.attribute(s.Require(name)).role));
      })
      .def("index", &Schema::Require, "name"_a)
      .def_property_readonly("target", [](const Schema& s) -> std::optional<std::string> {
        auto t = s.target_index();
        if (!t) return std::nullopt;
        return s.attribute(*t).name;
      })
      .def("hash", &Schema::Hash)
      .def("__eq__", [](const Schema& a, const Schema& b) { return a == b; });

  py::class_<Dataset>(m, "Dataset")
      .def_static("read_csv", &LoadCsv, "path"_a, "schema"_a)
      .def_static("from_csv_text", [](const std::string& text, const Schema& schema) {
        std::istringstream in(text);
        return ParseCsv(in, schema);
      }, "text"_a, "schema"_a)
      .def("to_csv_text", [](const Dataset& d) {
        std::ostringstream out;
        WriteCsv(d, out);
        return out.str();
      })
      .def("write_csv", py::overload_cast<const Dataset&, const std::string&>(&WriteCsv))
      .def_property_readonly("schema", &Dataset::schema)
      .def_property_readonly("ids", &Dataset::ids)
      .def("__len__", &Dataset::num_rows)
      .def("cells", &CellsArray, "Level indices as an (n, m) uint16 array.")
      .def("column", [](const Dataset& d, const std::string& name) {
        return d.Column(d.schema().Require(name));
      })
      .def("fingerprint", &Dataset::Fingerprint)
      .def("sample", &SampleRows, "n"_a, "seed"_a)
      .def("project", &ProjectToSchema, "schema"_a)
      .def("__eq__", [](const Dataset& a, const Dataset& b) { return a == b; });

  py::class_<MarginalSet>(m, "MarginalSet")
      .def_static("load", &LoadMarginals, "path"_a)
      .def("save", [](const MarginalSet& s, const std::string& path) { SaveMarginals(s, path); })
      .def("of", py::overload_cast<std::string_view>(&MarginalSet::of, py::const_), "name"_a)
      .def_property_readonly("source_fingerprint", &MarginalSet::source_fingerprint);
  m.def("compute_marginals", &ComputeMarginals, "data"_a);
  m.def("tv_distance", [](const std::vector<double>& p, const std::vector<double>& q) {
    return TvDistance(p, q);
  });

  m.def("default_generator_yaml", [] {
    GeneratorSpec spec = DefaultGeneratorSpec();
    return GeneratorConfigYaml(spec, DefaultDriftSpec(spec));
  });
  m.def("make_study_splits",
        [](std::size_t n_train, std::size_t n_exclusive, Seed seed,
           std::optional<std::string> generator_yaml) {
          GeneratorConfig g{DefaultGeneratorSpec(), {}};
          g.drift = DefaultDriftSpec(g.spec);
          if (generator_yaml) g = ParseGeneratorConfig(*generator_yaml);
          SplitBundle s = MakeStudySplits(g.spec, g.drift, n_train, n_exclusive, seed);
          return py::make_tuple(std::move(s.inclusive_2013), std::move(s.inclusive_2015),
                                std::move(s.exclusive_2015));
        },
        "n_train"_a, "n_exclusive"_a, "seed"_a = 0, "generator_yaml"_a = py::none(),
        "Returns (inclusive_2013, inclusive_2015, exclusive_2015).");

  m.def("rank_features",
        [](const Dataset& d, const std::string& target, const std::vector<std::string>& exclude) {
          py::list out;
          for (const FeatureScore& s : RankFeatures(d, target, exclude)) {
            out.append(py::make_tuple(s.name, s.chi2, s.rank));
          }
          return out;
        },
        "data"_a, "target"_a, "exclude"_a = std::vector<std::string>{});
  m.def("select_k_best",
        [](const Dataset& d, const std::string& target, std::size_t k,
           const std::vector<std::string>& always_keep) {
          return SelectKBest(d, target, k, always_keep);
        },
        "data"_a, "target"_a, "k"_a, "always_keep"_a = std::vector<std::string>{});

  py::class_<FittedModel, std::shared_ptr<FittedModel>>(m, "Model")
      .def_static("load", [](const std::string& path) {
        return std::make_shared<FittedModel>(FittedModel::Load(path));
      })
      .def_static("from_json", [](const std::string& text) {
        return std::make_shared<FittedModel>(FittedModel::FromJson(text));
      })
      .def("save", &FittedModel::Save)
      .def("to_json", &FittedModel::ToJson)
      .def_property_readonly("algorithm", [](const FittedModel& f) {
        return std::string(AlgorithmName(f.algorithm()));
      })
      .def_property_readonly("feature_schema", &FittedModel::feature_schema)
      .def_property_readonly("training_fingerprint", &FittedModel::training_fingerprint)
      .def("predict", &FittedModel::PredictAll, "data"_a)
      .def("score", &FittedModel::ScoreAll, "data"_a)
      .def("predict_record", [](const FittedModel& f, const std::vector<int>& r) {
        return f.Predict(ToLevels(r));
      });
  m.def("fit",
        [](const Dataset& train, const std::string& algorithm, std::size_t max_depth,
           std::size_t min_leaf, std::size_t n_trees, std::size_t features_per_split,
           std::size_t k_neighbors, double laplace_alpha, Seed seed) {
          py::gil_scoped_release release;
          return std::make_shared<FittedModel>(
              Fit(MakeSpec(algorithm, max_depth, min_leaf, n_trees, features_per_split,
                           k_neighbors, laplace_alpha, seed),
                  train));
        },
        "train"_a, "algorithm"_a = "random_forest", "max_depth"_a = 0, "min_leaf"_a = 1,
        "n_trees"_a = 100, "features_per_split"_a = 0, "k_neighbors"_a = 5,
        "laplace_alpha"_a = 1.0, "seed"_a = 0);

  // The oracle is non-movable, so it lives behind a unique_ptr holder.
  py::class_<QueryOracle, std::unique_ptr<QueryOracle>>(m, "QueryOracle")
      .def(py::init([](std::shared_ptr<FittedModel> model) {
        return std::make_unique<QueryOracle>(std::move(model));
      }), "model"_a)
      .def("query", [](const QueryOracle& o, const std::vector<int>& r) {
        return o.Query(ToLevels(r));
      })
      .def_property_readonly("queries", &QueryOracle::queries)
      .def_property_readonly("feature_schema", &QueryOracle::feature_schema);

  py::class_<TargetRecord>(m, "TargetRecord")
      .def_property_readonly("id", &TargetRecord::id)
      .def_property_readonly("label", &TargetRecord::label)
      .def_property_readonly("hidden", &TargetRecord::hidden)
      .def("view", [](const TargetRecord& t) {
        std::vector<int> out;
        for (Level v : t.attacker_view().features) {
          out.push_back(v == kUnknownLevel ? -1 : static_cast<int>(v));
        }
        return out;
      });
  m.def("make_targets", &MakeTargets, "data"_a, "feature_schema"_a, "target"_a,
        "sensitive"_a);

  m.def("lomia_case1",
        [](const QueryOracle& oracle, const std::vector<int>& record, int label,
           std::size_t sensitive) -> std::optional<int> {
          AttackerView view{0, ToLevels(record), static_cast<Level>(label)};
          auto level = LomiaCase1(oracle, view, sensitive);
          if (!level) return std::nullopt;
          return static_cast<int>(*level);
        },
        "oracle"_a, "record"_a, "label"_a, "sensitive_index"_a,
        "record uses -1 for the unknown sensitive cell.");

  py::class_<AttackOutcome>(m, "AttackOutcome")
      .def_readonly("sensitive", &AttackOutcome::sensitive)
      .def_readonly("n_case1_predicted", &AttackOutcome::n_case1_predicted)
      .def_readonly("n_case1_correct", &AttackOutcome::n_case1_correct)
      .def_readonly("queries", &AttackOutcome::queries)
      .def_property_readonly("overall", [](const AttackOutcome& o) { return MetricsDict(o.overall); })
      .def_property_readonly("case1", [](const AttackOutcome& o) { return MetricsDict(o.case1); })
      .def_property_readonly("fallback",
                             [](const AttackOutcome& o) { return MetricsDict(o.fallback); })
      .def_property_readonly("predictions", [](const AttackOutcome& o) {
        py::list out;
        for (const AttackPrediction& p : o.predictions) {
          out.append(py::make_tuple(p.id, p.predicted, std::string(ProvenanceName(p.provenance))));
        }
        return out;
      });
  m.def("run_lomia",
        [](const QueryOracle& oracle, const std::vector<TargetRecord>& targets,
           const std::string& sensitive, const MarginalSet& marginals,
           const std::string& fallback, Seed seed) {
          py::gil_scoped_release release;
          return RunLomiaWithMarginals(oracle, targets, sensitive, marginals,
                                       ParseFallbackMode(fallback), seed);
        },
        "oracle"_a, "targets"_a, "sensitive"_a, "marginals"_a, "fallback"_a = "sample",
        "seed"_a = 0);
  m.def("run_marginals_only",
        [](const std::vector<TargetRecord>& targets, const Schema& feature_schema,
           const std::string& sensitive, const MarginalSet& marginals,
           const std::string& fallback, Seed seed) {
          return RunMarginalsOnly(targets, feature_schema, sensitive, marginals,
                                  ParseFallbackMode(fallback), seed);
        },
        "targets"_a, "feature_schema"_a, "sensitive"_a, "marginals"_a,
        "fallback"_a = "sample", "seed"_a = 0);

  py::class_<SynthModel>(m, "SynthModel")
      .def_property_readonly("visiting_sequence", [](const SynthModel& s) {
        std::vector<std::string> out;
        for (std::size_t i : s.sequence()) out.push_back(s.schema().attribute(i).name);
        return out;
      })
      .def("generate", &Generate, "n"_a, "seed"_a = 0, "first_id"_a = 0);
  m.def("fit_synthesizer",
        [](const Dataset& train, std::size_t min_leaf, Seed seed,
           const std::vector<std::string>& visiting_sequence) {
          py::gil_scoped_release release;
          return FitSequentialCart(train, {visiting_sequence, min_leaf, seed});
        },
        "train"_a, "min_leaf"_a = 5, "seed"_a = 0,
        "visiting_sequence"_a = std::vector<std::string>{});
  m.def("compare_marginals", [](const Dataset& a, const Dataset& b) {
    py::dict out;
    for (const AttributeFidelity& f : CompareMarginals(a, b)) out[py::str(f.name)] = f.tv_distance;
    return out;
  });

  m.def("auc", [](const std::vector<Level>& t, const std::vector<double>& s) { return Auc(t, s); });
  m.def("mcc", [](const std::vector<Level>& t, const std::vector<Level>& p) { return Mcc(t, p); });
  m.def("accuracy",
        [](const std::vector<Level>& t, const std::vector<Level>& p) { return Accuracy(t, p); });
  m.def("f1_macro",
        [](const std::vector<Level>& t, const std::vector<Level>& p) { return F1Macro(t, p); });
  m.def("precision_recall_macro", [](const std::vector<Level>& t, const std::vector<Level>& p) {
    const PrecisionRecall pr = PrecisionRecallMacro(t, p);
    return py::make_tuple(pr.precision, pr.recall);
  });

  m.def("run_all",
        [](const std::string& config_yaml, const std::string& out_dir) {
          const ExperimentConfig config = ParseExperimentConfig(config_yaml);
          py::gil_scoped_release release;
          RunAll(config, out_dir);
        },
        "config_yaml"_a, "out_dir"_a,
        "Run the whole experiment; writes data/, models/, reports/, manifest.json.");
}
