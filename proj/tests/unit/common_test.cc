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

#include "lomia/common.h"

#include <atomic>
#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

namespace lomia {
namespace {

TEST(DeriveSeedTest, DeterministicAndDistinct) {
  EXPECT_EQ(DeriveSeed(42, 7), DeriveSeed(42, 7));
  EXPECT_EQ(DeriveSeed(42, "synth"), DeriveSeed(42, "synth"));
  std::set<Seed> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(DeriveSeed(1, i));
  EXPECT_EQ(seen.size(), 10000u);
  EXPECT_NE(DeriveSeed(1, "a"), DeriveSeed(1, "b"));
  EXPECT_NE(DeriveSeed(1, "a"), DeriveSeed(2, "a"));
}

TEST(Fnv1aTest, KnownVectors) {
  EXPECT_EQ(Fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(Fnv1a("foobar"), 0x85944171f73967e8ULL);
  EXPECT_EQ(HexU64(0xaf63dc4c8601ec8cULL), "af63dc4c8601ec8c");
  EXPECT_EQ(HexU64(1), "0000000000000001");
}

TEST(SampleCategoricalTest, FrequenciesFollowWeights) {
  Rng rng(3);
  const std::vector<double> w = {1, 0, 3};
  std::vector<int> counts(3, 0);
  const int n = 40000;
  for (int i = 0; i < n; ++i) ++counts[SampleCategorical(w, rng)];
  EXPECT_EQ(counts[1], 0);
  // 4 sigma of a binomial(40000, 0.25).
  EXPECT_NEAR(counts[0] / double(n), 0.25, 4 * std::sqrt(0.25 * 0.75 / n));
}

TEST(SampleCategoricalTest, RejectsDegenerateWeights) {
  Rng rng(0);
  const std::vector<double> zero = {0, 0};
  EXPECT_THROW(SampleCategorical(zero, rng), Error);
  const std::vector<double> negative = {1, -1};
  EXPECT_THROW(SampleCategorical(negative, rng), Error);
}

TEST(ParallelForTest, VisitsEveryIndexOnce) {
  for (unsigned workers : {1u, 2u, 7u}) {
    std::vector<std::atomic<int>> hits(1000);
    ParallelFor(hits.size(), [&](std::size_t i) { ++hits[i]; }, workers);
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(ParallelForTest, PropagatesExceptions) {
  EXPECT_THROW(ParallelFor(
                   100, [](std::size_t i) { if (i == 37) throw Error("boom"); }, 4),
               Error);
}

}  // namespace
}  // namespace lomia
