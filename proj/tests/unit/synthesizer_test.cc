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

#include "lomia/synthesizer.h"

#include <algorithm>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "lomia/features.h"
#include "lomia/surrogate.h"
#include "test_support.h"

namespace lomia {
namespace {

using testing::Attr;
using testing::BinaryTarget;

SynthesisConfig Config(Seed seed = 1, std::size_t min_leaf = 5) {
  SynthesisConfig c;
  c.seed = seed;
  c.min_leaf = min_leaf;
  return c;
}

// x2 copies x1; x3 is noise.
Dataset CopyPair(std::size_t n, Seed seed) {
  const Schema s({Attr("x1", 4), Attr("x2", 4), Attr("x3", 3)});
  Dataset raw = testing::RandomDataset(s, n, seed);
  std::vector<Level> cells = raw.cells();
  for (std::size_t r = 0; r < n; ++r) cells[3 * r + 1] = cells[3 * r];
  return Dataset(s, raw.ids(), cells);
}

TEST(SynthesisTest, SingleAttributeIsItsMarginal) {
  const Schema s({Attr("only", 3)});
  const Dataset d = testing::FromRows(s, {{0}, {2}, {2}, {2}, {1}, {2}});
  const SynthModel m = FitSequentialCart(d, Config());
  EXPECT_EQ(m.sequence(), (std::vector<std::size_t>{0}));
  EXPECT_EQ(m.first_marginal_counts(), (std::vector<std::uint32_t>{1, 1, 4}));
  EXPECT_THROW(m.Leaves(1), Error);
  const Dataset syn = Generate(m, 30000, 2);
  const auto p = ComputeMarginals(syn).of(0);
  EXPECT_NEAR(p[0], 1.0 / 6, 0.01);
  EXPECT_NEAR(p[2], 4.0 / 6, 0.01);
}

TEST(SynthesisTest, LeafCountsMatchPartitionReplay) {
  const Schema s({Attr("a", 3), Attr("b", 4), Attr("c", 2), Attr("e", 5)});
  Dataset raw = testing::RandomDataset(s, 800, 4);
  std::vector<Level> cells = raw.cells();
  Rng rng(7);
  for (std::size_t r = 0; r < 800; ++r) {
    Level* row = cells.data() + 4 * r;
    if (rng() % 3) row[1] = row[0];
    if (rng() % 2) row[3] = static_cast<Level>((row[0] + row[2]) % 5);
  }
  const Dataset train(s, raw.ids(), cells);
  for (std::size_t min_leaf : {1, 5, 30}) {
    SynthesisConfig config = Config(2, min_leaf);
    config.visiting_sequence = {"c", "a", "e", "b"};
    const SynthModel m = FitSequentialCart(train, config);
    EXPECT_EQ(m.sequence(), (std::vector<std::size_t>{2, 0, 3, 1}));
    for (std::size_t pos = 1; pos < 4; ++pos) {
      const std::size_t attr = m.sequence()[pos];
      std::map<std::size_t, std::vector<std::uint32_t>> replay;
      for (std::size_t r = 0; r < train.num_rows(); ++r) {
        auto& counts = replay[m.RouteLeaf(pos, train.row(r))];
        counts.resize(s.attribute(attr).num_levels(), 0);
        ++counts[train.at(r, attr)];
      }
      const auto leaves = m.Leaves(pos);
      EXPECT_EQ(replay.size(), leaves.size());
      for (std::size_t leaf : leaves) {
        auto stored = m.LeafCounts(pos, leaf);
        ASSERT_TRUE(replay.count(leaf));
        EXPECT_EQ(std::vector<std::uint32_t>(stored.begin(), stored.end()), replay[leaf]);
        std::uint32_t total = 0;
        for (auto c : stored) total += c;
        EXPECT_GE(total, min_leaf);
      }
      // Trees only look at earlier attributes.
      for (std::size_t tested : m.TestedAttributes(pos)) {
        const auto it = std::find(m.sequence().begin(), m.sequence().end(), tested);
        EXPECT_LT(static_cast<std::size_t>(it - m.sequence().begin()), pos);
      }
    }
  }
}

TEST(SynthesisTest, CopiedAttributeHasPureLeavesAndIsPreserved) {
  const Dataset train = CopyPair(2000, 5);
  SynthesisConfig config = Config(3, 1);
  config.visiting_sequence = {"x1", "x2", "x3"};
  const SynthModel m = FitSequentialCart(train, config);
  for (std::size_t leaf : m.Leaves(1)) {
    std::size_t nonzero = 0;
    for (auto c : m.LeafCounts(1, leaf)) nonzero += c > 0;
    EXPECT_EQ(nonzero, 1u);
  }
  const Dataset syn = Generate(m, 5000, 9);
  for (std::size_t r = 0; r < syn.num_rows(); ++r) ASSERT_EQ(syn.at(r, 0), syn.at(r, 1));
}

TEST(SynthesisTest, ConstantColumnStaysConstant) {
  const Schema s({Attr("k", 3), Attr("v", 4), BinaryTarget()});
  Dataset raw = testing::RandomDataset(s, 500, 2);
  std::vector<Level> cells = raw.cells();
  for (std::size_t r = 0; r < 500; ++r) cells[3 * r] = 2;
  const Dataset train(s, raw.ids(), cells);
  const Dataset syn = Generate(FitSequentialCart(train, Config()), 2000, 3);
  for (std::size_t r = 0; r < syn.num_rows(); ++r) ASSERT_EQ(syn.at(r, 0), 2);
}

TEST(SynthesisTest, SurrogateMarginalsAndNoFabricatedLevels) {
  const GeneratorSpec spec = DefaultGeneratorSpec();
  const Dataset train = GeneratePopulation(spec, 10000, 17);
  const SynthModel m = FitSequentialCart(train, Config(4));
  const Dataset syn = Generate(m, 10000, 5, 1000000000);
  EXPECT_EQ(syn.ids().front(), 1000000000);
  for (const AttributeFidelity& f : CompareMarginals(train, syn)) {
    EXPECT_LT(f.tv_distance, 0.05) << f.name;
  }
  const Schema& s = train.schema();
  for (std::size_t c = 0; c < s.size(); ++c) {
    std::set<Level> seen;
    for (std::size_t r = 0; r < train.num_rows(); ++r) seen.insert(train.at(r, c));
    for (std::size_t r = 0; r < syn.num_rows(); ++r) {
      ASSERT_TRUE(seen.count(syn.at(r, c))) << s.attribute(c).name;
    }
  }
}

TEST(SynthesisTest, FirstAttributeReproducesItsMarginal) {
  const GeneratorSpec spec = DefaultGeneratorSpec();
  const Dataset train = GeneratePopulation(spec, 10000, 21);
  const Schema& s = train.schema();
  const MarginalSet original = ComputeMarginals(train);
  for (const std::string first : {"age", "income", "moved"}) {
    SynthesisConfig config = Config(6);
    config.visiting_sequence = {first};
    for (const std::string& name : s.names()) {
      if (name != first) config.visiting_sequence.push_back(name);
    }
    const Dataset syn = Generate(FitSequentialCart(train, config), 10000, 8);
    EXPECT_LT(TvDistance(original.of(first), ComputeMarginals(syn).of(first)), 0.03) << first;
  }
}

TEST(SynthesisTest, DefaultSequenceRanksByChi2TargetLast) {
  const GeneratorSpec spec = DefaultGeneratorSpec();
  const Dataset train = GeneratePopulation(spec, 3000, 2);
  const auto seq = DefaultVisitingSequence(train);
  ASSERT_EQ(seq.size(), train.schema().size());
  EXPECT_EQ(seq.back(), "moved");
  const auto ranked = RankFeatures(train, "moved");
  for (std::size_t i = 0; i < ranked.size(); ++i) EXPECT_EQ(seq[i], ranked[i].name);
}

TEST(SynthesisTest, Deterministic) {
  const Dataset train = CopyPair(1000, 8);
  const SynthModel a = FitSequentialCart(train, Config(5));
  const SynthModel b = FitSequentialCart(train, Config(5));
  EXPECT_EQ(Generate(a, 500, 4).cells(), Generate(b, 500, 4).cells());
  EXPECT_NE(Generate(a, 500, 4).cells(), Generate(a, 500, 5).cells());
}

TEST(SynthesisTest, InvalidInputsRejected) {
  const Dataset train = CopyPair(100, 1);
  EXPECT_THROW(FitSequentialCart(Dataset(train.schema(), {}, {}), Config()), Error);
  EXPECT_THROW(FitSequentialCart(train, Config(1, 0)), Error);
  SynthesisConfig dup = Config();
  dup.visiting_sequence = {"x1", "x1", "x3"};
  EXPECT_THROW(FitSequentialCart(train, dup), Error);
  SynthesisConfig short_seq = Config();
  short_seq.visiting_sequence = {"x1", "x2"};
  EXPECT_THROW(FitSequentialCart(train, short_seq), Error);
  SynthesisConfig unknown = Config();
  unknown.visiting_sequence = {"x1", "x2", "zz"};
  EXPECT_THROW(FitSequentialCart(train, unknown), Error);
  EXPECT_THROW(Generate(FitSequentialCart(train, Config()), 0, 1), Error);
}

}  // namespace
}  // namespace lomia
