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

#ifndef ADMITSIM_FITTER_H_
#define ADMITSIM_FITTER_H_

// Recovering region structure from aggregate admissions statistics.
//
// Unknowns per region r: shape k^(r), scale theta^(r), threshold q^(r), and
// per group a the split n_a^(r) of its applicants across regions. Four
// constraint families are matched in weighted least squares on relative
// mismatches:
//
//   applicants        sum_r n_a^(r)                          vs applicants_a
//   admits            sum_r n_a^(r) F^(r)(q^(r))             vs admits_a
//   applicant quant.  sum_r F^(r)(q*) N^(r)                  vs frac * N
//   admit quant.      sum_r F^(r)(min(q*, q^(r))) N^(r)      vs frac * N
//
// where N^(r) = sum_a n_a^(r), N is the applicant total and q* the log
// score of a raw-score cut. Both quantile fractions are shares of all
// applicants at or above the cut, so admit_frac <= applicant_frac.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "admitsim/gamma.h"
#include "admitsim/population.h"

namespace admitsim {

struct QuantilePoint {
  double raw_score;       // cut s*
  double applicant_frac;  // share of applicants with score >= s*
  double admit_frac;      // share of applicants admitted with score >= s*
};

struct SummaryStats {
  std::vector<std::string> groups;
  std::vector<double> applicants;
  std::vector<double> admits;
  /// Sorted by descending raw score.
  std::vector<QuantilePoint> quantiles;
  ScoreScale scale{0.0, 4.0};

  double total_applicants() const;
  double total_admits() const;
};

/// Raises a validation (or domain, for cuts off the scale) error when the
/// statistics are internally inconsistent.
void validate_summary_stats(const SummaryStats& stats);

/// Log scores of the quantile cuts, in the order of stats.quantiles. The
/// share at or above s* equals the CDF at q* because the conversion
/// reverses order.
std::vector<LogScore> convert_quantile_points(const SummaryStats& stats);

struct FamilyWeights {
  double applicants = 1.0;
  double admits = 1.0;
  double applicant_quantiles = 1.0;
  double admit_quantiles = 1.0;
};

/// A candidate point. counts is row-major groups x regions.
struct FitParameters {
  std::vector<GammaParams> region_dists;
  std::vector<double> thresholds;
  std::vector<double> counts;
};

struct ObjectiveValue {
  double loss = 0.0;
  /// Signed relative mismatch per constraint, keyed "<family>/<label>":
  /// applicants/<group>, admits/<group>, applicant_quantile/<s*>,
  /// admit_quantile/<s*>.
  std::map<std::string, double> residuals;
};

/// Loss = sum over families of (weight / terms in family) * sum residual^2.
/// A residual is (model - observed) / observed, or / total applicants when
/// the observation is 0.
ObjectiveValue objective(const SummaryStats& stats, const FitParameters& candidate,
                         const FamilyWeights& weights = {});

struct FitProblem {
  SummaryStats stats;
  std::size_t num_regions = 3;
  FamilyWeights weights;
  std::size_t restarts = 32;
  std::uint64_t rng_seed = 0;
  std::size_t max_evaluations = 20000;   // per restart
  std::size_t stagnation_iterations = 200;
  double stagnation_tolerance = 1e-10;   // relative
  unsigned threads = 1;                  // 0 = hardware concurrency
};

struct FitSolution {
  std::vector<std::string> groups;
  /// "0" .. "R-1", ordered by ascending mean k * theta.
  std::vector<std::string> regions;
  std::vector<GammaParams> region_dists;
  std::vector<double> thresholds;
  std::vector<double> counts;  // row-major groups x regions
  ScoreScale scale{0.0, 4.0};

  double loss = 0.0;
  std::map<std::string, double> residuals;
  bool converged = false;
  std::size_t evaluations = 0;
  std::size_t best_restart = 0;

  double count(std::size_t group, std::size_t region) const {
    return counts[group * regions.size() + region];
  }
  /// sum_r n_a^(r) F^(r)(q^(r)) / sum_r n_a^(r).
  double group_admit_rate(std::size_t group) const;
  FitParameters parameters() const;
  /// The fitted population (groups x fitted regions).
  Population population() const;
};

/// Multi-start Nelder-Mead. Deterministic given the problem (including
/// rng_seed) regardless of thread count; the best restart wins with ties
/// broken by restart index.
FitSolution fit(const FitProblem& problem);

}  // namespace admitsim

#endif  // ADMITSIM_FITTER_H_
