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

#include "lomia/features.h"

#include <algorithm>

#include <fmt/format.h>

namespace lomia {
namespace {

double Chi2(const Dataset& data, std::size_t feature, std::size_t target) {
  const std::size_t kf = data.schema().attribute(feature).num_levels();
  const std::size_t kt = data.schema().attribute(target).num_levels();
  std::vector<double> table(kf * kt, 0.0);
  for (std::size_t r = 0; r < data.num_rows(); ++r) {
    table[data.at(r, feature) * kt + data.at(r, target)] += 1;
  }
  std::vector<double> row_sum(kf, 0.0), col_sum(kt, 0.0);
  for (std::size_t i = 0; i < kf; ++i) {
    for (std::size_t j = 0; j < kt; ++j) {
      row_sum[i] += table[i * kt + j];
      col_sum[j] += table[i * kt + j];
    }
  }
  const double n = static_cast<double>(data.num_rows());
  double chi2 = 0;
  for (std::size_t i = 0; i < kf; ++i) {
    if (row_sum[i] == 0) continue;
    for (std::size_t j = 0; j < kt; ++j) {
      if (col_sum[j] == 0) continue;
      const double expected = row_sum[i] * col_sum[j] / n;
      const double d = table[i * kt + j] - expected;
      chi2 += d * d / expected;
    }
  }
  return chi2;
}

}  // namespace

FeatureScore Chi2Score(const Dataset& data, std::string_view feature,
                       std::string_view target) {
  if (data.empty()) throw Error("chi2: dataset is empty");
  const std::size_t f = data.schema().Require(feature);
  const std::size_t t = data.schema().Require(target);
  return {std::string(feature), Chi2(data, f, t), 0};
}

std::vector<FeatureScore> RankFeatures(const Dataset& data,
                                       std::string_view target,
                                       std::span<const std::string> exclude) {
  if (data.empty()) throw Error("chi2: dataset is empty");
  const Schema& schema = data.schema();
  const std::size_t t = schema.Require(target);
  for (const std::string& name : exclude) schema.Require(name);
  std::vector<FeatureScore> scores;
  for (std::size_t c = 0; c < schema.size(); ++c) {
    const std::string& name = schema.attribute(c).name;
    if (c == t || std::find(exclude.begin(), exclude.end(), name) != exclude.end()) {
      continue;
    }
    scores.push_back({name, Chi2(data, c, t), 0});
  }
  std::stable_sort(scores.begin(), scores.end(),
                   [](const FeatureScore& a, const FeatureScore& b) {
                     return a.chi2 > b.chi2;
                   });
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i].rank = i + 1;
  return scores;
}

Schema SelectKBest(const Dataset& data, std::string_view target, std::size_t k,
                   std::span<const std::string> always_keep) {
  if (k == 0) throw Error("select_k_best: k must be >= 1");
  const Schema& schema = data.schema();
  std::vector<FeatureScore> ranked = RankFeatures(data, target, always_keep);
  if (k > ranked.size()) {
    throw Error(fmt::format("select_k_best: k = {} exceeds the {} candidates", k,
                            ranked.size()));
  }
  std::vector<bool> chosen(schema.size(), false);
  for (std::size_t i = 0; i < k; ++i) chosen[schema.Require(ranked[i].name)] = true;
  std::vector<AttributeSpec> attrs;
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (chosen[c]) attrs.push_back(schema.attribute(c));
  }
  attrs.push_back(schema.attribute(schema.Require(target)));
  for (const std::string& name : always_keep) {
    attrs.push_back(schema.attribute(schema.Require(name)));
  }
  return Schema(std::move(attrs));
}

}  // namespace lomia
