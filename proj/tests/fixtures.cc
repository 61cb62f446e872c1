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

#include "fixtures.h"

#include <algorithm>

#include "admitsim/gamma.h"

namespace admitsim::testing {

std::string data_path(const std::string& name) {
  return std::string(ADMITSIM_TEST_DATA_DIR) + "/" + name;
}

Population fixture_population(double shape, double theta_poor, double theta_rich) {
  DemographicTable table({std::string(kUrm), std::string(kNonUrm)},
                         {std::string(kPoor), std::string(kRich)}, {30, 10, 20, 40});
  return Population(std::move(table),
                    {GammaParams(shape, theta_poor), GammaParams(shape, theta_rich)},
                    ScoreScale(0.0, 4.0));
}

Instance InstanceGenerator::next(bool equal_shapes) {
  for (;;) {
    const double k_poor = uniform(1.0, 10.0);
    double k_rich = k_poor;
    if (!equal_shapes && uniform(0.0, 1.0) < 0.5) k_rich = uniform(1.0, k_poor);
    const double theta_poor = uniform(0.01, 1.0);
    const double theta_rich = uniform(0.01, theta_poor);

    std::vector<double> counts(4);
    for (double& c : counts) c = uniform(1.0, 100.0);
    // Rows: URM, nonURM. Columns: poor, rich.
    if (!(counts[0] * counts[3] > counts[1] * counts[2])) continue;
    if (!(counts[0] + counts[1] < counts[2] + counts[3])) continue;

    DemographicTable table({std::string(kUrm), std::string(kNonUrm)},
                           {std::string(kPoor), std::string(kRich)}, counts);
    Population pop(std::move(table),
                   {GammaParams(k_poor, theta_poor), GammaParams(k_rich, theta_rich)},
                   ScoreScale(0.0, 4.0));
    const double n = pop.total();
    const Capacity g(uniform(0.05 * n, 0.95 * n));
    if (!validate_theorem_setting(pop, g).empty()) continue;
    return Instance{std::move(pop), g};
  }
}

SyntheticTruth synthetic_truth() {
  SyntheticTruth t;
  t.groups = {"AfricanAmerican", "Asian", "Hispanic", "White", "Other"};
  t.params.region_dists = {GammaParams(6.0, 0.03), GammaParams(4.0, 0.08),
                           GammaParams(2.5, 0.2)};
  t.params.thresholds = {0.2, 0.35, 0.3};
  t.params.counts = {
      800,  1500, 2700,   //
      9000, 6000, 3000,   //
      3000, 7000, 10000,  //
      8000, 6000, 2500,   //
      1200, 900,  600,    //
  };
  // A cut at the top of the scale maps to q* = 0, where every statistic is 0.
  t.cuts = {3.9, 3.7, 3.3, 3.0};
  return t;
}

SummaryStats forward_model(const SyntheticTruth& truth) {
  const auto& p = truth.params;
  const std::size_t num_regions = p.region_dists.size();
  SummaryStats stats;
  stats.groups = truth.groups;
  stats.scale = truth.scale;

  std::vector<double> region_n(num_regions, 0.0);
  std::vector<double> region_rate(num_regions);
  for (std::size_t r = 0; r < num_regions; ++r) {
    region_rate[r] = gamma_cdf(p.region_dists[r], LogScore(p.thresholds[r]));
  }
  double total = 0.0;
  for (std::size_t g = 0; g < truth.groups.size(); ++g) {
    double applied = 0.0;
    double admitted = 0.0;
    for (std::size_t r = 0; r < num_regions; ++r) {
      const double n = p.counts[g * num_regions + r];
      applied += n;
      admitted += n * region_rate[r];
      region_n[r] += n;
    }
    stats.applicants.push_back(applied);
    stats.admits.push_back(admitted);
    total += applied;
  }

  std::vector<double> cuts = truth.cuts;
  std::sort(cuts.begin(), cuts.end(), std::greater<>());
  for (double cut : cuts) {
    const LogScore q = to_log_score(cut, truth.scale);
    double applied = 0.0;
    double admitted = 0.0;
    for (std::size_t r = 0; r < num_regions; ++r) {
      const LogScore bar(std::min(q.value(), p.thresholds[r]));
      applied += region_n[r] * gamma_cdf(p.region_dists[r], q);
      admitted += region_n[r] * gamma_cdf(p.region_dists[r], bar);
    }
    stats.quantiles.push_back({cut, applied / total, admitted / total});
  }
  return stats;
}

}  // namespace admitsim::testing
