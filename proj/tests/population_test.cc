// Copyright 2026 The admitsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "admitsim/population.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <random>

#include "admitsim/errors.h"
#include "fixtures.h"
#include "oracle.h"

namespace admitsim {
namespace {

using testing::fixture_population;

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::kIo;
}

bool has_condition(const std::vector<AssumptionViolation>& v, std::string_view name) {
  return std::any_of(v.begin(), v.end(), [&](const auto& x) { return x.condition == name; });
}

TEST(DemographicTable, TotalsAndLookup) {
  const Population pop = fixture_population();
  const auto& t = pop.table();
  EXPECT_EQ(t.total(), 100.0);
  EXPECT_EQ(t.count("URM", "poor"), 30.0);
  EXPECT_EQ(t.count("nonURM", "rich"), 40.0);
  EXPECT_EQ(t.group_total(0), 40.0);
  EXPECT_EQ(t.region_total(1), 50.0);
  EXPECT_EQ(t.group_index("nonURM"), 1u);
  EXPECT_FALSE(t.region_index("middle").has_value());
  EXPECT_EQ(kind_of([&] { (void)t.count("URM", "middle"); }), ErrorKind::kArgument);
}

TEST(DemographicTable, RejectsBadCounts) {
  EXPECT_EQ(kind_of([] { DemographicTable({"a"}, {"x", "y"}, {1.0, -1.0}); }),
            ErrorKind::kValidation);
  EXPECT_EQ(kind_of([] {
              DemographicTable({"a"}, {"x"}, {std::numeric_limits<double>::quiet_NaN()});
            }),
            ErrorKind::kValidation);
  EXPECT_EQ(kind_of([] { DemographicTable({"a", "a"}, {"x"}, {1.0, 2.0}); }),
            ErrorKind::kValidation);
  EXPECT_EQ(kind_of([] { DemographicTable({""}, {"x"}, {1.0}); }), ErrorKind::kValidation);
  EXPECT_EQ(kind_of([] { DemographicTable({"a"}, {"x"}, {1.0, 2.0}); }), ErrorKind::kValidation);
}

TEST(DemographicTable, FractionalCountsAllowed) {
  DemographicTable t({"a"}, {"x", "y"}, {0.25, 1.5});
  EXPECT_EQ(t.total(), 1.75);
}

TEST(DemographicTable, FromEntriesKeepsFirstAppearanceOrder) {
  const std::vector<DemographicTable::Entry> entries = {
      {"g2", "r2", 1}, {"g1", "r2", 2}, {"g2", "r1", 3}, {"g1", "r1", 4}};
  const auto t = DemographicTable::from_entries(entries);
  EXPECT_EQ(t.groups(), (std::vector<std::string>{"g2", "g1"}));
  EXPECT_EQ(t.regions(), (std::vector<std::string>{"r2", "r1"}));
  EXPECT_EQ(t.count("g1", "r1"), 4.0);

  const std::vector<DemographicTable::Entry> missing = {{"g1", "r1", 1}, {"g2", "r2", 1}};
  EXPECT_THROW(DemographicTable::from_entries(missing), Error);
  const std::vector<DemographicTable::Entry> dup = {{"g1", "r1", 1}, {"g1", "r1", 2}};
  EXPECT_THROW(DemographicTable::from_entries(dup), Error);
}

TEST(Population, DistributionsKeyedByRegion) {
  DemographicTable t({"a"}, {"x", "y"}, {1.0, 2.0});
  EXPECT_THROW(Population(t, {GammaParams(1, 1)}, ScoreScale(0, 1)), Error);
  std::map<std::string, GammaParams> wrong = {{"x", GammaParams(1, 1)}, {"z", GammaParams(1, 1)}};
  EXPECT_THROW(Population(t, wrong, ScoreScale(0, 1)), Error);
  std::map<std::string, GammaParams> right = {{"y", GammaParams(2, 1)}, {"x", GammaParams(1, 1)}};
  const Population pop(t, right, ScoreScale(0, 1));
  EXPECT_EQ(pop.dist("y").shape(), 2.0);
  EXPECT_EQ(pop.dist(0).shape(), 1.0);
}

TEST(Capacity, Bounds) {
  EXPECT_EQ(kind_of([] { Capacity(0.0); }), ErrorKind::kCapacity);
  EXPECT_EQ(kind_of([] { Capacity(-1.0); }), ErrorKind::kCapacity);
  const Population pop = fixture_population();
  EXPECT_EQ(kind_of([&] { check_capacity(pop, Capacity(100.0)); }), ErrorKind::kCapacity);
  EXPECT_NO_THROW(check_capacity(pop, Capacity(1e-9)));
}

TEST(ValidateSetting, FixtureHoldsEverything) {
  EXPECT_TRUE(validate_theorem_setting(fixture_population(), Capacity(50)).empty());
}

TEST(ValidateSetting, EqualCountsViolateDisproportion) {
  DemographicTable t({"URM", "nonURM"}, {"poor", "rich"}, {25, 25, 25, 25});
  const Population pop(t, {GammaParams(2, 0.3), GammaParams(2, 0.15)}, ScoreScale(0, 4));
  const auto v = validate_theorem_setting(pop, Capacity(50));
  EXPECT_TRUE(has_condition(v, kHistoricalDisproportion));
  EXPECT_TRUE(has_condition(v, kUrmMinority));
  EXPECT_FALSE(has_condition(v, kCdfDominance));
}

TEST(ValidateSetting, CapacityAtTotal) {
  const auto v = validate_theorem_setting(fixture_population(), Capacity(100));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].condition, kLimitedCapacity);
}

TEST(ValidateSetting, ReversedDominance) {
  const auto v = validate_theorem_setting(fixture_population(2.0, 0.15, 0.3), Capacity(50));
  EXPECT_TRUE(has_condition(v, kCdfDominance));
}

TEST(ValidateSetting, CrossingCdfsAreNotDominant) {
  // Rich has the larger shape: its CDF starts below the poor one.
  const Population pop(fixture_population().table(), {GammaParams(2, 0.3), GammaParams(4, 0.05)},
                       ScoreScale(0, 4));
  EXPECT_TRUE(has_condition(validate_theorem_setting(pop, Capacity(50)), kCdfDominance));
}

TEST(ValidateSetting, WrongLabelsAreStructureErrors) {
  DemographicTable t({"A", "B"}, {"poor", "rich"}, {30, 10, 20, 40});
  const Population pop(t, {GammaParams(2, 0.3), GammaParams(2, 0.15)}, ScoreScale(0, 4));
  EXPECT_EQ(kind_of([&] { validate_theorem_setting(pop, Capacity(50)); }),
            ErrorKind::kStructure);
}

ThresholdMap uniform_thresholds(const Population& pop, LogScore q) {
  ThresholdMap out;
  for (const auto& e : pop.table().entries()) out.emplace(Cell{e.group, e.region}, q);
  return out;
}

TEST(ExpectedAdmits, Extremes) {
  const Population pop = fixture_population();
  EXPECT_EQ(expected_admits(pop, uniform_thresholds(pop, LogScore::zero())), 0.0);
  EXPECT_EQ(expected_admits(pop, uniform_thresholds(pop, LogScore::infinity())), 100.0);
}

TEST(ExpectedAdmits, MissingCell) {
  const Population pop = fixture_population();
  auto th = uniform_thresholds(pop, LogScore(0.3));
  th.erase(Cell{"URM", "rich"});
  EXPECT_EQ(kind_of([&] { expected_admits(pop, th); }), ErrorKind::kArgument);
}

TEST(ExpectedAdmits, SingleCellQuantileGivesCapacity) {
  const GammaParams p(3.5, 0.2);
  const Population pop(DemographicTable({"a"}, {"x"}, {80}), {p}, ScoreScale(0, 4));
  const double q = static_cast<double>(oracle::bisect(
      [](oracle::real x) { return oracle::gamma_cdf(3.5L, 0.2L, x) - 30.0L / 80.0L; }, 0.0L,
      10.0L));
  ThresholdMap th = {{Cell{"a", "x"}, LogScore(q)}};
  EXPECT_NEAR(expected_admits(pop, th), 30.0, 1e-10);
}

TEST(ExpectedAdmits, MonotoneInEachThreshold) {
  const Population pop = fixture_population();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<> u(0.0, 1.5);
  for (int trial = 0; trial < 200; ++trial) {
    ThresholdMap th;
    for (const auto& e : pop.table().entries()) th.emplace(Cell{e.group, e.region}, LogScore(u(rng)));
    const double base = expected_admits(pop, th);
    for (auto& [cell, q] : th) {
      const LogScore saved = q;
      q = LogScore(saved.value() + u(rng));
      EXPECT_GE(expected_admits(pop, th), base);
      q = saved;
    }
  }
}

}  // namespace
}  // namespace admitsim
