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

#ifndef LOMIA_FEATURES_H_
#define LOMIA_FEATURES_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lomia/data.h"

namespace lomia {

struct FeatureScore {
  std::string name;
  double chi2 = 0;
  std::size_t rank = 0;  // 1-based; 0 when scored in isolation
};

// Pearson chi-squared statistic of the full feature x target contingency
// table. Levels with zero marginal count are dropped before computing
// expected counts.
FeatureScore Chi2Score(const Dataset& data, std::string_view feature,
                       std::string_view target);

// Scores every attribute except `target` and `exclude`, sorted by descending
// chi2 with ties in schema order; ranks are 1..m.
std::vector<FeatureScore> RankFeatures(const Dataset& data,
                                       std::string_view target,
                                       std::span<const std::string> exclude = {});

// Schema of the k best candidates (in schema order), then the target, then
// `always_keep` in the given order. Candidates are all attributes other than
// the target and `always_keep`.
Schema SelectKBest(const Dataset& data, std::string_view target, std::size_t k,
                   std::span<const std::string> always_keep = {});

}  // namespace lomia

#endif  // LOMIA_FEATURES_H_
