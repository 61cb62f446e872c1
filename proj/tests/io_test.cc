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

#include "admitsim/io.h"

#include <gtest/gtest.h>

#include <clocale>
#include <cmath>
#include <filesystem>
#include <limits>

#include "admitsim/errors.h"
#include "admitsim/montecarlo.h"
#include "admitsim/procedures.h"
#include "admitsim/theorems.h"
#include "fixtures.h"

namespace admitsim {
namespace {

using testing::data_path;

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::kIo;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("admitsim_io_" + name)).string();
}

const char* kPopulationText = R"({
  "version": 1,
  "scale": {"s_min": 0, "s_max": 4},
  "capacity": {"g": 50},
  "regions": [
    {"id": "poor", "shape": 2, "scale_param": 0.3},
    {"id": "rich", "shape": 2, "scale_param": 0.15}
  ],
  "counts": [
    {"group": "URM", "region": "poor", "n": 30},
    {"group": "URM", "region": "rich", "n": 10},
    {"group": "nonURM", "region": "poor", "n": 20},
    {"group": "nonURM", "region": "rich", "n": 40}
  ]
})";

TEST(Population, BundledFixtureParsesAndValidates) {
  const PopulationFile file = parse_population(data_path(testing::kFixturePopulationJson));
  ASSERT_TRUE(file.capacity.has_value());
  EXPECT_EQ(file.capacity->value(), 50.0);
  EXPECT_TRUE(validate_theorem_setting(file.population, *file.capacity).empty());
  const Population expected = testing::fixture_population();
  EXPECT_EQ(file.population.region_dists(), expected.region_dists());
  EXPECT_EQ(file.population.table().total(), 100.0);
  EXPECT_EQ(file.population.table().count("URM", "rich"), 10.0);
  EXPECT_EQ(file.population.scale(), expected.scale());
}

TEST(Population, RoundTripThroughSerializer) {
  const PopulationFile file = parse_population_text(kPopulationText);
  const std::string text = population_to_text(file);
  const PopulationFile again = parse_population_text(text);
  EXPECT_EQ(population_to_text(again), text);
  EXPECT_EQ(again.population.region_dists(), file.population.region_dists());

  // Awkward doubles survive bit-exact.
  DemographicTable t({"a"}, {"x"}, {0.1 + 0.2});
  const PopulationFile odd{Population(t, {GammaParams(1.0 / 3.0, 2.0 / 7.0)},
                                      ScoreScale(-1e-300, std::nextafter(4.0, 5.0))),
                           Capacity(std::numeric_limits<double>::denorm_min())};
  const PopulationFile back = parse_population_text(population_to_text(odd));
  EXPECT_EQ(back.population.table().count(0, 0), 0.1 + 0.2);
  EXPECT_EQ(back.population.dist(0).shape(), 1.0 / 3.0);
  EXPECT_EQ(back.population.scale().s_max(), std::nextafter(4.0, 5.0));
  EXPECT_EQ(back.capacity->value(), std::numeric_limits<double>::denorm_min());
}

TEST(Population, ErrorsNameTheField) {
  std::string bad = kPopulationText;
  bad.replace(bad.find("\"n\": 10"), 7, "\"n\": -10");
  EXPECT_EQ(kind_of([&] { parse_population_text(bad); }), ErrorKind::kValidation);

  std::string dup = kPopulationText;
  dup.replace(dup.find("\"id\": \"rich\""), 12, "\"id\": \"poor\"");
  EXPECT_EQ(kind_of([&] { parse_population_text(dup); }), ErrorKind::kParse);
  EXPECT_NE(message_of([&] { parse_population_text(dup); }).find("regions[1].id"),
            std::string::npos);

  std::string typo = kPopulationText;
  typo.replace(typo.find("\"shape\": 2, \"scale_param\": 0.15"), 10, "\"shape\": \"2\"");
  EXPECT_NE(message_of([&] { parse_population_text(typo); }).find("regions[1].shape"),
            std::string::npos);

  EXPECT_EQ(kind_of([] { parse_population_text("{\"version\": 1"); }), ErrorKind::kParse);
  EXPECT_EQ(kind_of([] { parse_population_text("{\"version\": 2}"); }), ErrorKind::kParse);
  EXPECT_EQ(kind_of([] { parse_population("/nonexistent/pop.json"); }), ErrorKind::kIo);

  std::string negative_shape = kPopulationText;
  negative_shape.replace(negative_shape.find("\"shape\": 2"), 10, "\"shape\": -2");
  EXPECT_EQ(kind_of([&] { parse_population_text(negative_shape); }), ErrorKind::kDomain);
}

TEST(SummaryStats, BundledSyntheticParsesLosslessly) {
  const SummaryStats parsed =
      parse_summary_stats(data_path(testing::kSyntheticGroupsCsv),
                          data_path(testing::kSyntheticQuantilesCsv), ScoreScale(0, 4));
  const SummaryStats expected = testing::forward_model(testing::synthetic_truth());
  EXPECT_EQ(parsed.groups, expected.groups);
  EXPECT_EQ(parsed.applicants, expected.applicants);
  EXPECT_EQ(parsed.admits, expected.admits);
  ASSERT_EQ(parsed.quantiles.size(), expected.quantiles.size());
  for (std::size_t i = 0; i < parsed.quantiles.size(); ++i) {
    EXPECT_EQ(parsed.quantiles[i].raw_score, expected.quantiles[i].raw_score);
    EXPECT_EQ(parsed.quantiles[i].applicant_frac, expected.quantiles[i].applicant_frac);
    EXPECT_EQ(parsed.quantiles[i].admit_frac, expected.quantiles[i].admit_frac);
  }
}

TEST(SummaryStats, SortsByDescendingCut) {
  const std::string groups = "group,applicants,admits\nA,10,2\n";
  const std::string quantiles =
      "gpa_cut,applicant_frac_at_or_above,admit_frac_at_or_above\n3.0,0.8,0.2\n3.9,0.1,0.05\r\n"
      "3.5,0.4,0.15\n";
  const SummaryStats s = parse_summary_stats_text(groups, quantiles, ScoreScale(0, 4));
  ASSERT_EQ(s.quantiles.size(), 3u);
  EXPECT_EQ(s.quantiles[0].raw_score, 3.9);
  EXPECT_EQ(s.quantiles[2].raw_score, 3.0);
}

TEST(SummaryStats, Errors) {
  const std::string groups = "group,applicants,admits\nA,10,2\n";
  const std::string header = "gpa_cut,applicant_frac_at_or_above,admit_frac_at_or_above\n";
  const ScoreScale scale(0, 4);
  EXPECT_EQ(kind_of([&] { parse_summary_stats_text(groups, header, scale); }),
            ErrorKind::kValidation);
  EXPECT_EQ(kind_of([&] { parse_summary_stats_text(groups, header + "4.3,0.1,0.05\n", scale); }),
            ErrorKind::kDomain);
  EXPECT_EQ(kind_of([&] { parse_summary_stats_text(groups, header + "3.5,0.1,0.2\n", scale); }),
            ErrorKind::kValidation);
  EXPECT_EQ(kind_of([&] { parse_summary_stats_text(groups, header + "3.5,0.1\n", scale); }),
            ErrorKind::kParse);
  EXPECT_EQ(kind_of([&] { parse_summary_stats_text(groups, header + "3,5,0.1,0.05\n", scale); }),
            ErrorKind::kParse);
  EXPECT_EQ(kind_of([&] { parse_summary_stats_text(groups, header + "3.5,abc,0.05\n", scale); }),
            ErrorKind::kParse);
  EXPECT_EQ(kind_of([&] {
              parse_summary_stats_text("grp,applicants,admits\nA,1,1\n", header + "3.5,0.1,0.05\n",
                                       scale);
            }),
            ErrorKind::kParse);
  const std::string msg = message_of(
      [&] { parse_summary_stats_text(groups, header + "3.5,0.1,x\n", scale); });
  EXPECT_NE(msg.find("line 2"), std::string::npos);
  EXPECT_NE(msg.find("admit_frac_at_or_above"), std::string::npos);
}

TEST(SummaryStats, WriteThenParse) {
  const SummaryStats s = testing::forward_model(testing::synthetic_truth());
  const auto g = temp_path("groups.csv");
  const auto q = temp_path("quantiles.csv");
  write_summary_stats(s, g, q);
  const SummaryStats back = parse_summary_stats(g, q, s.scale);
  std::filesystem::remove(g);
  std::filesystem::remove(q);
  EXPECT_EQ(back.admits, s.admits);
  EXPECT_EQ(back.quantiles.back().admit_frac, s.quantiles.back().admit_frac);
}

TEST(Density, IntegratesToOne) {
  const Population pop(DemographicTable({"a"}, {"x"}, {1}), {GammaParams(6, 0.03)},
                       ScoreScale(0, 4));
  const DensityGrid d = make_density_grid(pop);
  ASSERT_EQ(d.q.size(), kDensityGridPoints);
  EXPECT_EQ(d.q.front(), 1e-4);
  EXPECT_NEAR(trapezoid(d.q, d.region_density[0]), 1.0, 1e-3);
}

TEST(Density, OverallIsCountWeightedMixture) {
  const Population pop = testing::fixture_population(3.0, 0.3, 0.1);
  const DensityGrid d = make_density_grid(pop);
  for (std::size_t i = 0; i < d.q.size(); ++i) {
    const double mix = 0.5 * d.region_density[0][i] + 0.5 * d.region_density[1][i];
    EXPECT_NEAR(d.overall[i], mix, 1e-15 * std::max(1.0, mix));
    EXPECT_NEAR(d.raw_score[i], 4.0 * std::exp(-d.q[i]), 1e-12);
  }
  for (const auto& dens : d.region_density) {
    const double mass = trapezoid(d.q, dens);
    EXPECT_GE(mass, 0.99);
    EXPECT_LE(mass, 1.0001);
  }
}

ReportBundle sample_bundle() {
  const PopulationFile file{testing::fixture_population(), Capacity(50)};
  const Population& pop = file.population;
  ReportBundle b;
  b.source = "check";
  b.population = file;
  b.outcomes.push_back(solve_quota(pop, Capacity(50), 2.0));  // has +inf thresholds
  b.outcomes.push_back(solve_plus_factor(pop, Capacity(50), 0.8));
  b.outcomes.push_back(solve_top_percentage(pop, Capacity(50)));
  b.theorems.push_back(check_theorem1(pop, Capacity(50), 2.0));
  b.theorems.push_back(check_theorem2(pop, Capacity(50), 0.9));
  b.theorems.push_back(check_theorem3(pop, Capacity(50)));

  const Cohort cohort = sample_cohort(pop, 5, 10);
  const auto tally = replay_tally(cohort, b.outcomes[1]);
  EmpiricalRates emp;
  emp.seed = 5;
  emp.replication = 10;
  emp.admitted = tally.admitted;
  emp.size = tally.size;
  for (const auto& [cell, m] : tally.size) emp.rate[cell] = double(tally.admitted.at(cell)) / m;
  b.empirical = emp;
  b.density = make_density_grid(pop);

  FitSolution fit;
  fit.groups = {"a", "b"};
  fit.regions = {"0"};
  fit.region_dists = {GammaParams(2.5, 0.1)};
  fit.thresholds = {0.2};
  fit.counts = {1.0 / 3.0, 2.0 / 3.0};
  fit.loss = 1e-20;
  fit.residuals = {{"applicants/a", -1e-17}};
  fit.converged = true;
  fit.evaluations = 1234;
  fit.best_restart = 7;
  b.fit = fit;
  return b;
}

TEST(Report, ReparseIsBitExact) {
  const ReportBundle b = sample_bundle();
  const std::string text = report_to_text(b);
  const ReportBundle back = report_from_text(text);
  EXPECT_EQ(report_to_text(back), text);

  ASSERT_EQ(back.outcomes.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back.outcomes[i].thresholds, b.outcomes[i].thresholds);
    EXPECT_EQ(back.outcomes[i].admit_prob, b.outcomes[i].admit_prob);
    EXPECT_EQ(back.outcomes[i].admit_count, b.outcomes[i].admit_count);
    EXPECT_EQ(back.outcomes[i].procedure, b.outcomes[i].procedure);
    EXPECT_EQ(back.outcomes[i].q_dagger, b.outcomes[i].q_dagger);
    EXPECT_EQ(back.outcomes[i].region_thresholds, b.outcomes[i].region_thresholds);
  }
  EXPECT_TRUE(std::isinf(back.outcomes[0].thresholds.at(Cell{"URM", "poor"}).value()));
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back.theorems[i].witness, b.theorems[i].witness);
    EXPECT_EQ(back.theorems[i].preconditions, b.theorems[i].preconditions);
    EXPECT_EQ(back.theorems[i].conclusion_holds, b.theorems[i].conclusion_holds);
    EXPECT_EQ(back.theorems[i].note, b.theorems[i].note);
  }
  EXPECT_EQ(back.empirical->rate, b.empirical->rate);
  EXPECT_EQ(back.empirical->size, b.empirical->size);
  EXPECT_EQ(back.density->overall, b.density->overall);
  EXPECT_EQ(back.density->raw_score, b.density->raw_score);
  EXPECT_EQ(back.fit->counts, b.fit->counts);
  EXPECT_EQ(back.fit->residuals, b.fit->residuals);
  EXPECT_EQ(back.fit->best_restart, 7u);
}

TEST(Report, DeterministicAndLocaleIndependent) {
  const ReportBundle b = sample_bundle();
  const std::string first = report_to_text(b);
  EXPECT_EQ(report_to_text(b), first);
  if (std::setlocale(LC_ALL, "de_DE.UTF-8") != nullptr) {
    EXPECT_EQ(report_to_text(b), first);
    EXPECT_EQ(format_double(0.5), "0.5");
    std::setlocale(LC_ALL, "C");
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Report, FileRoundTripAndIoErrors) {
  const ReportBundle b = sample_bundle();
  const auto path = temp_path("report.json");
  emit_report(b, path);
  EXPECT_EQ(report_to_text(parse_report(path)), report_to_text(b));
  std::filesystem::remove(path);
  EXPECT_EQ(kind_of([&] { emit_report(b, "/nonexistent-dir/x/report.json"); }), ErrorKind::kIo);
}

}  // namespace
}  // namespace admitsim
