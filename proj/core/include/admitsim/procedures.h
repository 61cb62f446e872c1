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

#ifndef ADMITSIM_PROCEDURES_H_
#define ADMITSIM_PROCEDURES_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "admitsim/gamma.h"
#include "admitsim/population.h"

namespace admitsim {

enum class ProcedureKind { kDefault, kQuota, kPlusFactor, kTopPercentage };

/// "default", "quota", "plus-factor", "top-percentage".
std::string_view to_string(ProcedureKind kind);
std::optional<ProcedureKind> parse_procedure_kind(std::string_view name);

/// True for the procedures that take a free coefficient (quota, plus-factor).
bool procedure_takes_eta(ProcedureKind kind);

struct ProcedureSpec {
  ProcedureKind kind = ProcedureKind::kDefault;
  /// eta_quota for kQuota, eta_dagger for kPlusFactor, unset otherwise.
  std::optional<double> eta;
};

/// Per-cell thresholds and their consequences. admit_prob[c] is exactly
/// gamma_cdf(region dist, thresholds[c]) and admit_count[c] = n_c * admit_prob[c].
struct ProcedureOutcome {
  ProcedureKind procedure = ProcedureKind::kDefault;
  double capacity = 0.0;
  std::optional<double> eta;

  ThresholdMap thresholds;
  CellMap<double> admit_prob;
  CellMap<double> admit_count;

  std::optional<double> q_default;        // q_o (default, plus-factor)
  std::optional<double> q_dagger;         // plus-factor
  std::optional<double> eta_quota_prime;  // quota
  std::map<std::string, double> region_thresholds;  // top-percentage q^(r)

  double total_admits() const;
  /// Sum of admit counts over the cells of one group.
  double group_admits(std::string_view group) const;
};

/// Root of sum_r n^(r) F^(r)(q) = g: the single default threshold q_o.
double solve_default_threshold(const Population& pop, const Capacity& g);

/// Induced nonURM weighting eta' from
///   eta' * (n_a' / n) * g = g - eta * (n_a / n) * g.
double quota_eta_prime(const Population& pop, double eta_quota);

/// Admissible eta_quota range [1, n / n_a].
double quota_eta_max(const Population& pop);

ProcedureOutcome solve_default(const Population& pop, const Capacity& g);

/// URM cells get F^(r)(q) = g * eta / n, nonURM cells F^(r)(q) = g * eta' / n.
/// Requires groups {URM, nonURM}; regions are arbitrary. A target of 0 gives
/// threshold 0, a target of exactly 1 gives +inf; above 1 raises an
/// infeasible-quota error.
ProcedureOutcome solve_quota(const Population& pop, const Capacity& g, double eta_quota);

/// URM scores are read on the scale eta_dagger * theta. The common threshold
/// q_dagger solves the capacity equation; URM cells report the equivalent
/// original-scale threshold q_dagger / eta_dagger.
ProcedureOutcome solve_plus_factor(const Population& pop, const Capacity& g,
                                   double eta_dagger);

/// One threshold per region with F^(r)(q^(r)) = g / n, shared by all groups.
ProcedureOutcome solve_top_percentage(const Population& pop, const Capacity& g);

ProcedureOutcome solve(const Population& pop, const Capacity& g, const ProcedureSpec& spec);

/// Unique crossing of the densities Gamma(k, theta_poor) and Gamma(k, theta_rich):
///   q = k ln(theta_poor / theta_rich) / (1/theta_rich - 1/theta_poor).
LogScore pdf_intersection(double shape, double theta_poor, double theta_rich);

}  // namespace admitsim

#endif  // ADMITSIM_PROCEDURES_H_
