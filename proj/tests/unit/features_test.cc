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
#include <cmath>

#include <gtest/gtest.h>

#include "test_support.h"

namespace lomia {
namespace {

using testing::Attr;
using testing::BinaryTarget;

// Independent contingency-table chi-squared.
double Chi2Oracle(const Dataset& d, std::size_t f, std::size_t t) {
  const std::size_t kf = d.schema().attribute(f).num_levels();
  const std::size_t kt = d.schema().attribute(t).num_levels();
  std::vector<std::vector<double>> obs(kf, std::vector<double>(kt, 0));
  for (std::size_t r = 0; r < d.num_rows(); ++r) obs[d.at(r, f)][d.at(r, t)] += 1;
  std::vector<double> rows(kf, 0), cols(kt, 0);
  double n = 0;
  for (std::size_t i = 0; i < kf; ++i) {
    for (std::size_t j = 0; j < kt; ++j) {
      rows[i] += obs[i][j];
      cols[j] += obs[i][j];
      n += obs[i][j];
    }
  }
  double chi2 = 0;
  for (std::size_t i = 0; i < kf; ++i) {
    for (std::size_t j = 0; j < kt; ++j) {
      if (rows[i] == 0 || cols[j] == 0) continue;
      const double e = rows[i] * cols[j] / n;
      chi2 += (obs[i][j] - e) * (obs[i][j] - e) / e;
    }
  }
  return chi2;
}

Dataset TwoByTwo(int a, int b, int c, int d) {
  const Schema s({Attr("f", 2), BinaryTarget()});
  std::vector<std::vector<Level>> rows;
  for (int i = 0; i < a; ++i) rows.push_back({0, 0});
  for (int i = 0; i < b; ++i) rows.push_back({0, 1});
  for (int i = 0; i < c; ++i) rows.push_back({1, 0});
  for (int i = 0; i < d; ++i) rows.push_back({1, 1});
  return testing::FromRows(s, rows);
}

TEST(Chi2Test, ClosedFormTwoByTwo) {
  const double a = 10, b = 20, c = 20, d = 10, n = 60;
  const double closed = n * (a * d - b * c) * (a * d - b * c) /
                        ((a + b) * (c + d) * (a + c) * (b + d));
  const FeatureScore s = Chi2Score(TwoByTwo(10, 20, 20, 10), "f", "y");
  EXPECT_NEAR(s.chi2, closed, 1e-9);
  EXPECT_NEAR(s.chi2, 6.6667, 1e-4);
}

TEST(Chi2Test, IndependentFeatureScoresZero) {
  EXPECT_NEAR(Chi2Score(TwoByTwo(7, 7, 3, 3), "f", "y").chi2, 0.0, 1e-12);
}

TEST(Chi2Test, PerfectCopyScoresN) {
  EXPECT_NEAR(Chi2Score(TwoByTwo(50, 0, 0, 50), "f", "y").chi2, 100.0, 1e-9);
}

TEST(Chi2Test, ZeroMarginalLevelsAreDropped) {
  const Schema s({Attr("f", 4), BinaryTarget()});
  const Dataset d = testing::FromRows(s, {{0, 0}, {0, 0}, {2, 1}, {2, 1}, {2, 0}});
  const double score = Chi2Score(d, "f", "y").chi2;
  EXPECT_TRUE(std::isfinite(score));
  EXPECT_NEAR(score, Chi2Oracle(d, 0, 1), 1e-12);
  // A constant target carries no information.
  const Dataset flat = testing::FromRows(s, {{0, 0}, {1, 0}, {2, 0}});
  EXPECT_EQ(Chi2Score(flat, "f", "y").chi2, 0.0);
}

TEST(Chi2Test, MatchesOracleAndIsPermutationInvariant) {
  const Schema s({Attr("a", 3), Attr("b", 6), Attr("c", 2), BinaryTarget()});
  const Dataset d = testing::RandomDataset(s, 700, 4);
  const Dataset shuffled = SampleRows(d, d.num_rows(), 1);
  for (std::size_t f = 0; f < 3; ++f) {
    const std::string name = s.attribute(f).name;
    EXPECT_NEAR(Chi2Score(d, name, "y").chi2, Chi2Oracle(d, f, 3), 1e-9);
    EXPECT_NEAR(Chi2Score(shuffled, name, "y").chi2, Chi2Score(d, name, "y").chi2, 1e-9);
  }
}

TEST(SelectKBestTest, CopyBeatsIndependent) {
  const Schema s({Attr("noise", 2), Attr("copy", 2), BinaryTarget()});
  std::vector<std::vector<Level>> rows;
  for (int i = 0; i < 40; ++i) {
    const Level y = i % 2;
    rows.push_back({static_cast<Level>((i / 2) % 2), y, y});
  }
  const Schema out = SelectKBest(testing::FromRows(s, rows), "y", 1);
  EXPECT_EQ(out.names(), (std::vector<std::string>{"copy", "y"}));
}

TEST(SelectKBestTest, AllFeaturesKeepsSchema) {
  const Schema s({Attr("a", 3), Attr("b", 2), BinaryTarget()});
  const Dataset d = testing::RandomDataset(s, 100, 2);
  EXPECT_EQ(SelectKBest(d, "y", 2), s);
}

TEST(SelectKBestTest, TopKMatchesBruteForce) {
  std::vector<AttributeSpec> attrs;
  for (int i = 0; i < 10; ++i) attrs.push_back(Attr("f" + std::to_string(i), 2 + i % 4));
  attrs.push_back(BinaryTarget());
  const Schema s(attrs);
  // Correlate some features with the target so scores are well separated.
  Dataset raw = testing::RandomDataset(s, 2000, 9);
  std::vector<Level> cells = raw.cells();
  Rng rng(1);
  for (std::size_t r = 0; r < raw.num_rows(); ++r) {
    Level* row = cells.data() + r * s.size();
    for (int f : {1, 4, 6}) {
      if (rng() % (2 + f) == 0) row[10] = row[f] % 2;
    }
  }
  const Dataset d(s, raw.ids(), cells);
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t f = 0; f < 10; ++f) scored.push_back({-Chi2Oracle(d, f, 10), f});
  std::sort(scored.begin(), scored.end());
  std::vector<std::string> expected;
  std::vector<std::size_t> top;
  for (int i = 0; i < 5; ++i) top.push_back(scored[i].second);
  std::sort(top.begin(), top.end());
  for (std::size_t f : top) expected.push_back(s.attribute(f).name);
  expected.push_back("y");
  EXPECT_EQ(SelectKBest(d, "y", 5).names(), expected);
}

TEST(SelectKBestTest, AlwaysKeepAndDeterminism) {
  const Schema s({Attr("a", 3), Attr("s", 2, Role::kSensitive), Attr("b", 2), BinaryTarget()});
  const Dataset d = testing::RandomDataset(s, 300, 5);
  const std::vector<std::string> keep = {"s"};
  const Schema out = SelectKBest(d, "y", 1, keep);
  EXPECT_EQ(out.size(), 3u);
  EXPECT_EQ(out.names()[1], "y");
  EXPECT_EQ(out.names()[2], "s");
  EXPECT_EQ(out, SelectKBest(d, "y", 1, keep));
  EXPECT_THROW(SelectKBest(d, "y", 0, keep), Error);
  EXPECT_THROW(SelectKBest(d, "y", 3, keep), Error);
}

TEST(RankFeaturesTest, TiesKeepSchemaOrder) {
  const Schema s({Attr("a", 2), Attr("b", 2), BinaryTarget()});
  // a and b are identical columns: equal scores.
  const Dataset d = testing::FromRows(s, {{0, 0, 0}, {1, 1, 1}, {0, 0, 1}, {1, 1, 1}});
  const auto ranked = RankFeatures(d, "y");
  ASSERT_EQ(ranked.size(), 2u);
  EXPECT_EQ(ranked[0].name, "a");
  EXPECT_EQ(ranked[0].rank, 1u);
  EXPECT_EQ(ranked[1].rank, 2u);
}

}  // namespace
}  // namespace lomia
