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

// Label-only model inversion attribute inference against a released model
// plus released marginals.
//
// LOMIA + Marginals: for each target, substitute every level of the sensitive
// attribute into the known record and query the model. If exactly one
// substitution reproduces the target's known label, predict that level
// ("case 1"). Otherwise fall back to the released marginal of the sensitive
// attribute. Marginals-Only skips the model entirely.
//
// Each attack targets one sensitive attribute; only that cell is hidden from
// the attacker, the rest of the feature record is known.

#ifndef LOMIA_ATTACK_H_
#define LOMIA_ATTACK_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lomia/common.h"
#include "lomia/data.h"
#include "lomia/oracle.h"

namespace lomia {

enum class FallbackMode { kSample, kMode };
enum class Provenance { kCase1, kMarginalFallback };

std::string_view FallbackModeName(FallbackMode mode);
FallbackMode ParseFallbackMode(std::string_view name);
std::string_view ProvenanceName(Provenance provenance);

// What the attacker holds about one target: its id, the model's feature
// record with every unknown cell set to kUnknownLevel, and the true label.
struct AttackerView {
  std::int64_t id = 0;
  std::vector<Level> features;
  Level label = 0;
};

class TargetRecord {
 public:
  // `features` follows the model's feature schema; features[hidden] is the
  // held-out sensitive value and never appears in attacker_view().
  TargetRecord(std::int64_t id, std::vector<Level> features, Level label,
               std::size_t hidden);

  std::int64_t id() const { return id_; }
  Level label() const { return label_; }
  std::size_t hidden() const { return hidden_; }
  AttackerView attacker_view() const;
  // Ground truth of the hidden cell, for scoring only.
  Level truth() const { return features_[hidden_]; }

 private:
  std::int64_t id_;
  std::vector<Level> features_;
  std::size_t hidden_;
  Level label_;
};

// One target per row of `data`, which must hold every feature of
// `feature_schema` and the target column `target` (matched by name).
// `sensitive` must have Role::kSensitive in `feature_schema`.
std::vector<TargetRecord> MakeTargets(const Dataset& data,
                                      const Schema& feature_schema,
                                      std::string_view target,
                                      std::string_view sensitive);

// Case-1 rule. `view` must have the sensitive cell unknown and no other
// unknown cell. Issues exactly K = #levels oracle queries.
std::optional<Level> LomiaCase1(const QueryOracle& oracle, const AttackerView& view,
                                std::size_t sensitive_feature);

// mode: argmax (ties -> lowest level index); sample: one draw. Throws on an
// all-zero marginal.
Level MarginalPredict(const MarginalSet& marginals, std::string_view sensitive,
                      FallbackMode mode, Rng& rng);
Level MarginalPredict(const MarginalSet& marginals, std::string_view sensitive,
                      FallbackMode mode, Seed seed);

struct AttackPrediction {
  std::int64_t id = 0;
  Level predicted = 0;
  Provenance provenance = Provenance::kMarginalFallback;
};

struct AttackMetrics {
  std::size_t n = 0;
  double precision = 0;  // macro
  double recall = 0;     // macro
  double f1_macro = 0;
  double accuracy = 0;
};

struct AttackOutcome {
  std::string sensitive;
  std::vector<AttackPrediction> predictions;  // one per target, input order
  std::size_t n_case1_predicted = 0;
  std::size_t n_case1_correct = 0;
  std::uint64_t queries = 0;
  AttackMetrics overall;
  // Split by provenance; n == 0 when the subset is empty.
  AttackMetrics case1;
  AttackMetrics fallback;
};

// Every target must hide `sensitive`. Per-target streams are
// DeriveSeed(seed, id), so a target's fallback draw does not depend on the
// order or parallel scheduling of targets.
AttackOutcome RunLomiaWithMarginals(const QueryOracle& oracle,
                                    std::span<const TargetRecord> targets,
                                    std::string_view sensitive,
                                    const MarginalSet& marginals,
                                    FallbackMode mode, Seed seed);

AttackOutcome RunMarginalsOnly(std::span<const TargetRecord> targets,
                               const Schema& feature_schema,
                               std::string_view sensitive,
                               const MarginalSet& marginals, FallbackMode mode,
                               Seed seed);

}  // namespace lomia

#endif  // LOMIA_ATTACK_H_
