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

// Shared test inputs: the two-region fixture population, a seeded generator
// of random instances in the theorem setting, and the synthetic fitting
// instance with its forward-model statistics.

#ifndef ADMITSIM_TESTS_FIXTURES_H_
#define ADMITSIM_TESTS_FIXTURES_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "admitsim/fitter.h"
#include "admitsim/population.h"

namespace admitsim::testing {

/// Absolute path of a file under tests/data.
std::string data_path(const std::string& name);

/// URM: 30 poor, 10 rich; nonURM: 20 poor, 40 rich; scale (0, 4).
Population fixture_population(double shape = 2.0, double theta_poor = 0.3,
                              double theta_rich = 0.15);
inline constexpr double kFixtureCapacity = 50.0;

struct Instance {
  Population pop;
  Capacity g;
};

/// Random populations with groups {URM, nonURM} x regions {poor, rich}
/// that satisfy every modelling assumption: k in [1, 10], theta in
/// [0.01, 1], counts in [1, 100], g in (0.05 n, 0.95 n).
class InstanceGenerator {
 public:
  explicit InstanceGenerator(std::uint64_t seed) : rng_(seed) {}

  /// With `equal_shapes` both regions share k; otherwise the rich region's
  /// shape is equal or smaller half of the time each.
  Instance next(bool equal_shapes = false);

  double uniform(double lo, double hi) { return std::uniform_real_distribution<>(lo, hi)(rng_); }

 private:
  std::mt19937_64 rng_;
};

/// Ground truth of the synthetic fitting instance (3 regions, 5 groups).
struct SyntheticTruth {
  std::vector<std::string> groups;
  FitParameters params;
  std::vector<double> cuts;  // raw-score quantile cuts
  ScoreScale scale{0.0, 4.0};
};

SyntheticTruth synthetic_truth();

/// Statistics the forward model produces for `truth`; quantiles sorted by
/// descending cut.
SummaryStats forward_model(const SyntheticTruth& truth);

inline constexpr const char* kSyntheticGroupsCsv = "synthetic_groups.csv";
inline constexpr const char* kSyntheticQuantilesCsv = "synthetic_quantiles.csv";
inline constexpr const char* kFixturePopulationJson = "population.json";

}  // namespace admitsim::testing

#endif  // ADMITSIM_TESTS_FIXTURES_H_
