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

#include "lomia/attack.h"

#include <algorithm>

#include <fmt/format.h>

#include "lomia/metrics.h"

namespace lomia {
namespace {

AttackMetrics Score(const std::vector<Level>& truth, const std::vector<Level>& pred) {
  AttackMetrics m;
  m.n = truth.size();
  if (truth.empty()) return m;
  const PrecisionRecall pr = PrecisionRecallMacro(truth, pred);
  m.precision = pr.precision;
  m.recall = pr.recall;
  m.f1_macro = F1Macro(truth, pred);
  m.accuracy = Accuracy(truth, pred);
  return m;
}

Level ArgMax(const std::vector<double>& p) {
  return static_cast<Level>(std::max_element(p.begin(), p.end()) - p.begin());
}

void Summarize(std::span<const TargetRecord> targets, AttackOutcome& outcome) {
  std::vector<Level> truth, pred, truth_case1, pred_case1, truth_fb, pred_fb;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const Level t = targets[i].truth();
    const AttackPrediction& p = outcome.predictions[i];
    truth.push_back(t);
    pred.push_back(p.predicted);
    if (p.provenance == Provenance::kCase1) {
      ++outcome.n_case1_predicted;
      outcome.n_case1_correct += p.predicted == t;
      truth_case1.push_back(t);
      pred_case1.push_back(p.predicted);
    } else {
      truth_fb.push_back(t);
      pred_fb.push_back(p.predicted);
    }
  }
  outcome.overall = Score(truth, pred);
  outcome.case1 = Score(truth_case1, pred_case1);
  outcome.fallback = Score(truth_fb, pred_fb);
}

void CheckHidden(std::span<const TargetRecord> targets, std::size_t sensitive) {
  for (const TargetRecord& t : targets) {
    if (t.hidden() != sensitive) {
      throw Error(fmt::format("target {} hides a different attribute", t.id()));
    }
  }
}

}  // namespace

std::string_view FallbackModeName(FallbackMode mode) {
  return mode == FallbackMode::kSample ? "sample" : "mode";
}

FallbackMode ParseFallbackMode(std::string_view name) {
  if (name == "sample") return FallbackMode::kSample;
  if (name == "mode") return FallbackMode::kMode;
  throw Error(fmt::format("unknown fallback mode '{}'", name));
}

std::string_view ProvenanceName(Provenance provenance) {
  return provenance == Provenance::kCase1 ? "case1" : "marginal_fallback";
}

TargetRecord::TargetRecord(std::int64_t id, std::vector<Level> features, Level label,
                           std::size_t hidden)
    : id_(id), features_(std::move(features)), hidden_(hidden), label_(label) {
  if (hidden_ >= features_.size()) throw Error("hidden cell outside the target record");
}

AttackerView TargetRecord::attacker_view() const {
  AttackerView view{id_, features_, label_};
  view.features[hidden_] = kUnknownLevel;
  return view;
}

std::vector<TargetRecord> MakeTargets(const Dataset& data,
                                      const Schema& feature_schema,
                                      std::string_view target,
                                      std::string_view sensitive) {
  const std::size_t hidden = feature_schema.Require(sensitive);
  if (feature_schema.attribute(hidden).role != Role::kSensitive) {
    throw Error(fmt::format("'{}' is not a sensitive attribute", sensitive));
  }
  const Dataset features = ProjectToSchema(data, feature_schema);
  const std::size_t label_column = data.schema().Require(target);
  std::vector<TargetRecord> out;
  out.reserve(data.num_rows());
  for (std::size_t r = 0; r < data.num_rows(); ++r) {
    auto row = features.row(r);
    out.emplace_back(data.id(r), std::vector<Level>(row.begin(), row.end()),
                     data.at(r, label_column), hidden);
  }
  return out;
}

std::optional<Level> LomiaCase1(const QueryOracle& oracle, const AttackerView& view,
                                std::size_t sensitive_feature) {
  const Schema& schema = oracle.feature_schema();
  if (view.features.size() != schema.size() || sensitive_feature >= schema.size()) {
    throw Error("attacker record does not match the oracle's feature schema");
  }
  for (std::size_t j = 0; j < view.features.size(); ++j) {
    const bool unknown = view.features[j] == kUnknownLevel;
    if (unknown != (j == sensitive_feature)) {
      throw Error(fmt::format(
          "attacker record must leave exactly the sensitive cell unknown ('{}')",
          schema.attribute(j).name));
    }
  }
  std::vector<Level> query = view.features;
  std::optional<Level> match;
  std::size_t matches = 0;
  const std::size_t k = schema.attribute(sensitive_feature).num_levels();
  for (std::size_t v = 0; v < k; ++v) {
    query[sensitive_feature] = static_cast<Level>(v);
    if (oracle.Query(query) == view.label) {
      ++matches;
      match = static_cast<Level>(v);
    }
  }
  if (matches != 1) return std::nullopt;
  return match;
}

Level MarginalPredict(const MarginalSet& marginals, std::string_view sensitive,
                      FallbackMode mode, Rng& rng) {
  const std::vector<double>& p = marginals.of(sensitive);
  if (std::all_of(p.begin(), p.end(), [](double v) { return v <= 0; })) {
    throw Error(fmt::format("marginal of '{}' is all zero", sensitive));
  }
  if (mode == FallbackMode::kMode) return ArgMax(p);
  return static_cast<Level>(SampleCategorical(p, rng));
}

Level MarginalPredict(const MarginalSet& marginals, std::string_view sensitive,
                      FallbackMode mode, Seed seed) {
  Rng rng(seed);
  return MarginalPredict(marginals, sensitive, mode, rng);
}

AttackOutcome RunLomiaWithMarginals(const QueryOracle& oracle,
                                    std::span<const TargetRecord> targets,
                                    std::string_view sensitive,
                                    const MarginalSet& marginals,
                                    FallbackMode mode, Seed seed) {
  if (targets.empty()) throw Error("attack needs at least one target");
  const Schema& schema = oracle.feature_schema();
  const std::size_t s = schema.Require(sensitive);
  if (marginals.schema().attribute(marginals.schema().Require(sensitive)).levels !=
      schema.attribute(s).levels) {
    throw Error(fmt::format("released marginal of '{}' does not match the model", sensitive));
  }
  CheckHidden(targets, s);

  const std::uint64_t queries_before = oracle.queries();
  AttackOutcome outcome;
  outcome.sensitive = std::string(sensitive);
  outcome.predictions.resize(targets.size());
  ParallelFor(targets.size(), [&](std::size_t i) {
    const AttackerView view = targets[i].attacker_view();
    AttackPrediction& p = outcome.predictions[i];
    p.id = view.id;
    if (auto level = LomiaCase1(oracle, view, s)) {
      p.predicted = *level;
      p.provenance = Provenance::kCase1;
    } else {
      Rng rng(DeriveSeed(seed, static_cast<std::uint64_t>(view.id)));
      p.predicted = MarginalPredict(marginals, sensitive, mode, rng);
      p.provenance = Provenance::kMarginalFallback;
    }
  });
  outcome.queries = oracle.queries() - queries_before;
  Summarize(targets, outcome);
  return outcome;
}

AttackOutcome RunMarginalsOnly(std::span<const TargetRecord> targets,
                               const Schema& feature_schema,
                               std::string_view sensitive,
                               const MarginalSet& marginals, FallbackMode mode,
                               Seed seed) {
  if (targets.empty()) throw Error("attack needs at least one target");
  CheckHidden(targets, feature_schema.Require(sensitive));
  AttackOutcome outcome;
  outcome.sensitive = std::string(sensitive);
  outcome.predictions.resize(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::int64_t id = targets[i].id();
    Rng rng(DeriveSeed(seed, static_cast<std::uint64_t>(id)));
    outcome.predictions[i] = {id, MarginalPredict(marginals, sensitive, mode, rng),
                              Provenance::kMarginalFallback};
  }
  Summarize(targets, outcome);
  return outcome;
}

}  // namespace lomia
