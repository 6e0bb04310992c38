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

// The attacker's view of a released model: labels in, labels out, and a
// query counter. There is deliberately no way to reach scores from here; the
// attack module only includes this header.

#ifndef LOMIA_ORACLE_H_
#define LOMIA_ORACLE_H_

#include <atomic>
#include <cstdint>
#include <memory>
#include <span>

#include "lomia/common.h"
#include "lomia/data.h"

namespace lomia {

class FittedModel;

class QueryOracle {
 public:
  explicit QueryOracle(std::shared_ptr<const FittedModel> model);
  QueryOracle(const QueryOracle&) = delete;
  QueryOracle& operator=(const QueryOracle&) = delete;

  // Predicted target level for a feature record (feature_schema() order).
  // Safe to call concurrently; every call counts as exactly one query.
  Level Query(std::span<const Level> features) const;

  std::uint64_t queries() const { return queries_.load(); }

  // Public input/output format of the released model.
  const Schema& feature_schema() const;
  const AttributeSpec& target() const;

 private:
  std::shared_ptr<const FittedModel> model_;
  mutable std::atomic<std::uint64_t> queries_{0};
};

}  // namespace lomia

#endif  // LOMIA_ORACLE_H_
