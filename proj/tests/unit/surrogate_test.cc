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

#include "lomia/surrogate.h"

#include <cmath>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "test_support.h"

namespace lomia {
namespace {

using testing::Attr;

GeneratorSpec IndependentUniform(const std::vector<std::size_t>& levels) {
  std::vector<AttributeSpec> attrs;
  std::vector<ConditionalTable> tables;
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    attrs.push_back(Attr("a" + std::to_string(i), levels[i]));
    tables.push_back({{}, {std::vector<double>(levels[i], 1.0 / levels[i])}});
    order.push_back(i);
  }
  return GeneratorSpec(Schema(attrs), order, tables);
}

double MutualInformation(const Dataset& d, std::size_t a, std::size_t b) {
  std::map<std::pair<Level, Level>, double> joint;
  std::map<Level, double> pa, pb;
  const double n = static_cast<double>(d.num_rows());
  for (std::size_t r = 0; r < d.num_rows(); ++r) {
    joint[{d.at(r, a), d.at(r, b)}] += 1 / n;
    pa[d.at(r, a)] += 1 / n;
    pb[d.at(r, b)] += 1 / n;
  }
  double mi = 0;
  for (const auto& [k, p] : joint) mi += p * std::log(p / (pa[k.first] * pb[k.second]));
  return mi;
}

TEST(GeneratorSpecTest, RejectsMalformedSpecs) {
  const Schema s({Attr("a", 2), Attr("b", 2)});
  const ConditionalTable root{{}, {{0.5, 0.5}}};
  const ConditionalTable child{{0}, {{1, 0}, {0, 1}}};
  EXPECT_NO_THROW(GeneratorSpec(s, {0, 1}, {root, child}));
  // Parent after child.
  EXPECT_THROW(GeneratorSpec(s, {1, 0}, {root, child}), Error);
  // Missing parent combination.
  EXPECT_THROW(GeneratorSpec(s, {0, 1}, {root, {{0}, {{1, 0}}}}), Error);
  // Row not summing to one.
  EXPECT_THROW(GeneratorSpec(s, {0, 1}, {{{}, {{0.5, 0.6}}}, child}), Error);
  // Incomplete order.
  EXPECT_THROW(GeneratorSpec(s, {0}, {root, child}), Error);
  // Self-parent.
  EXPECT_THROW(GeneratorSpec(s, {0, 1}, {root, {{1}, {{1, 0}, {0, 1}}}}), Error);
  // Too many parents.
  const Schema s4({Attr("a", 2), Attr("b", 2), Attr("c", 2), Attr("d", 2)});
  std::vector<std::vector<double>> rows8(8, {0.5, 0.5});
  EXPECT_THROW(GeneratorSpec(s4, {0, 1, 2, 3}, {root, root, root, {{0, 1, 2}, rows8}}), Error);
}

TEST(GeneratorSpecTest, TargetMustHaveLeakableAncestors) {
  const Schema s({Attr("n1", 2), Attr("n2", 2), Attr("s", 2, Role::kSensitive),
                  testing::BinaryTarget("y")});
  const ConditionalTable root{{}, {{0.5, 0.5}}};
  const std::vector<std::vector<double>> rows4(4, {0.5, 0.5});
  // y | (n1, n2): no sensitive ancestor.
  EXPECT_THROW(GeneratorSpec(s, {0, 1, 2, 3}, {root, root, root, {{0, 1}, rows4}}), Error);
  // y | (n2, s) with n2 | n1: two non-sensitive ancestors and one sensitive.
  const ConditionalTable n2{{0}, {{0.7, 0.3}, {0.3, 0.7}}};
  EXPECT_NO_THROW(GeneratorSpec(s, {0, 1, 2, 3}, {root, n2, root, {{1, 2}, rows4}}));
}

TEST(GeneratePopulationTest, IndependentUniformHasNoMutualInformation) {
  const GeneratorSpec spec = IndependentUniform({2, 3, 5, 4});
  const Dataset d = GeneratePopulation(spec, 50000, 1);
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = a + 1; b < 4; ++b) EXPECT_LT(MutualInformation(d, a, b), 0.01);
  }
}

TEST(GeneratePopulationTest, DeterministicChildIsRecoveredExactly) {
  const Schema s({Attr("a", 3), Attr("b", 3)});
  const GeneratorSpec spec(s, {0, 1},
                           {{{}, {{0.2, 0.3, 0.5}}}, {{0}, {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}}}});
  const Dataset d = GeneratePopulation(spec, 2000, 5);
  const Level lookup[] = {2, 0, 1};
  for (std::size_t r = 0; r < d.num_rows(); ++r) EXPECT_EQ(d.at(r, 1), lookup[d.at(r, 0)]);
}

TEST(GeneratePopulationTest, DeterministicUnderSeedAndIdOffset) {
  const GeneratorSpec spec = DefaultGeneratorSpec();
  EXPECT_EQ(GeneratePopulation(spec, 300, 9), GeneratePopulation(spec, 300, 9));
  EXPECT_NE(GeneratePopulation(spec, 300, 9), GeneratePopulation(spec, 300, 10));
  const Dataset shifted = GeneratePopulation(spec, 5, 9, 1000);
  EXPECT_EQ(shifted.id(0), 1000);
  EXPECT_EQ(shifted.cells(), GeneratePopulation(spec, 5, 9).cells());
}

TEST(GeneratePopulationTest, DefaultConditionalsWithinFourSigma) {
  const GeneratorSpec spec = DefaultGeneratorSpec();
  const Schema& s = spec.schema();
  const Dataset d = GeneratePopulation(spec, 100000, 2024);
  std::size_t checked = 0;
  for (std::size_t a = 0; a < s.size(); ++a) {
    const ConditionalTable& t = spec.table(a);
    std::vector<std::vector<double>> counts(t.rows.size(),
                                            std::vector<double>(s.attribute(a).num_levels()));
    for (std::size_t r = 0; r < d.num_rows(); ++r) {
      std::size_t combo = 0;
      for (std::size_t p : t.parents) combo = combo * s.attribute(p).num_levels() + d.at(r, p);
      counts[combo][d.at(r, a)] += 1;
    }
    for (std::size_t combo = 0; combo < t.rows.size(); ++combo) {
      double n = 0;
      for (double c : counts[combo]) n += c;
      if (n < 1) continue;
      for (std::size_t l = 0; l < counts[combo].size(); ++l) {
        const double p = t.rows[combo][l];
        const double sigma = std::sqrt(p * (1 - p) / n);
        EXPECT_LE(std::abs(counts[combo][l] / n - p), 4 * sigma + 1e-12)
            << s.attribute(a).name << " combo " << combo << " level " << l;
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 200u);
}

TEST(DefaultSpecTest, ShapeAndBaseRate) {
  const GeneratorSpec spec = DefaultGeneratorSpec();
  const Schema& s = spec.schema();
  EXPECT_NO_THROW(s.ValidateStudyRoles());
  EXPECT_EQ(s.IndicesWithRole(Role::kNonSensitive).size(), 12u);
  EXPECT_EQ(s.attribute(s.Require("gender")).num_levels(), 2u);
  EXPECT_EQ(s.attribute(s.Require("age")).num_levels(), 5u);
  EXPECT_EQ(s.attribute(s.Require("income")).num_levels(), 5u);
  const Dataset d = GeneratePopulation(spec, 20000, 1);
  const std::size_t y = *s.target_index();
  double positives = 0;
  for (std::size_t r = 0; r < d.num_rows(); ++r) positives += d.at(r, y);
  EXPECT_NEAR(positives / d.num_rows(), 0.25, 0.05);
  const DriftSpec drift = DefaultDriftSpec(spec);
  EXPECT_EQ(drift.persistence[s.Require("gender")], 1.0);
}

TEST(DriftTest, FullPersistenceIsIdentity) {
  const GeneratorSpec spec = DefaultGeneratorSpec();
  const Dataset d = GeneratePopulation(spec, 1000, 3);
  const DriftSpec keep{std::vector<double>(spec.schema().size(), 1.0)};
  EXPECT_EQ(ApplyTemporalDrift(d, spec, keep, 4), d);
}

TEST(DriftTest, ZeroPersistenceRedrawsIndependently) {
  const GeneratorSpec spec = IndependentUniform({2, 5, 4});
  const Dataset d = GeneratePopulation(spec, 20000, 3);
  const Dataset drifted =
      ApplyTemporalDrift(d, spec, DriftSpec{std::vector<double>(3, 0.0)}, 4);
  EXPECT_EQ(drifted.ids(), d.ids());
  for (std::size_t a = 0; a < 3; ++a) {
    const double k = static_cast<double>(spec.schema().attribute(a).num_levels());
    double agree = 0;
    for (std::size_t r = 0; r < d.num_rows(); ++r) agree += d.at(r, a) == drifted.at(r, a);
    const double p = 1 / k;
    EXPECT_NEAR(agree / d.num_rows(), p, 4 * std::sqrt(p * (1 - p) / d.num_rows()));
  }
}

TEST(DriftTest, DefaultKeepsGenderAndLevels) {
  const GeneratorSpec spec = DefaultGeneratorSpec();
  const Dataset d = GeneratePopulation(spec, 5000, 3);
  const Dataset drifted = ApplyTemporalDrift(d, spec, DefaultDriftSpec(spec), 6);
  const std::size_t g = spec.schema().Require("gender");
  std::size_t changed = 0;
  for (std::size_t r = 0; r < d.num_rows(); ++r) {
    EXPECT_EQ(d.at(r, g), drifted.at(r, g));
    for (std::size_t a = 0; a < spec.schema().size(); ++a) {
      EXPECT_LT(drifted.at(r, a), spec.schema().attribute(a).num_levels());
      changed += d.at(r, a) != drifted.at(r, a);
    }
  }
  EXPECT_GT(changed, 0u);
  DriftSpec bad = DefaultDriftSpec(spec);
  bad.persistence[0] = 1.5;
  EXPECT_THROW(ApplyTemporalDrift(d, spec, bad, 6), Error);
}

TEST(StudySplitsTest, IdContracts) {
  const GeneratorSpec spec = DefaultGeneratorSpec();
  const SplitBundle s = MakeStudySplits(spec, DefaultDriftSpec(spec), 500, 200, 1);
  EXPECT_EQ(s.inclusive_2013.ids(), s.inclusive_2015.ids());
  std::set<std::int64_t> inc(s.inclusive_2013.ids().begin(), s.inclusive_2013.ids().end());
  for (std::int64_t id : s.exclusive_2015.ids()) EXPECT_FALSE(inc.contains(id));
  EXPECT_EQ(s.exclusive_2015.num_rows(), 200u);
  EXPECT_THROW(MakeStudySplits(spec, DefaultDriftSpec(spec), 0, 10, 1), Error);
}

TEST(StudySplitsTest, ExclusiveMatchesInclusive2015Marginals) {
  const GeneratorSpec spec = DefaultGeneratorSpec();
  const SplitBundle s = MakeStudySplits(spec, DefaultDriftSpec(spec), 10000, 10000, 8);
  const MarginalSet a = ComputeMarginals(s.inclusive_2015);
  const MarginalSet b = ComputeMarginals(s.exclusive_2015);
  for (std::size_t c = 0; c < spec.schema().size(); ++c) {
    EXPECT_LT(TvDistance(a.of(c), b.of(c)), 0.05) << spec.schema().attribute(c).name;
  }
}

TEST(GeneratorConfigTest, YamlRoundTripIsExact) {
  const GeneratorSpec spec = DefaultGeneratorSpec();
  const DriftSpec drift = DefaultDriftSpec(spec);
  const GeneratorConfig parsed = ParseGeneratorConfig(GeneratorConfigYaml(spec, drift));
  EXPECT_EQ(parsed.spec, spec);
  EXPECT_EQ(parsed.drift, drift);
}

TEST(GeneratorConfigTest, ParsesHandWrittenSpec) {
  const GeneratorConfig g = ParseGeneratorConfig(R"(
attributes:
  - name: a
    levels: [x, y]
    table:
      - probs: [0.25, 0.75]
  - name: b
    levels: [p, q, r]
    parents: [a]
    persistence: 0.5
    table:
      - given: [y]
        probs: [0, 0, 1]
      - given: [x]
        probs: [1, 0, 0]
)");
  EXPECT_EQ(g.spec.table(1).rows[1], (std::vector<double>{0, 0, 1}));
  EXPECT_EQ(g.drift.persistence, (std::vector<double>{1.0, 0.5}));
  EXPECT_THROW(ParseGeneratorConfig(R"(
attributes:
  - name: a
    levels: [x, y]
    table:
      - probs: [0.25, 0.7]
)"),
               Error);
}

}  // namespace
}  // namespace lomia
