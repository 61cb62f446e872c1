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

#include "admitsim/theorems.h"

#include <cmath>
#include <limits>
#include <string>

#include "admitsim/errors.h"
#include "admitsim/procedures.h"

namespace admitsim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void add_setting_preconditions(const Population& pop, const Capacity& g,
                               TheoremReport& report) {
  for (auto name : {kHistoricalDisproportion, kUrmMinority, kCdfDominance, kLimitedCapacity}) {
    report.preconditions[std::string(name)] = true;
  }
  for (const auto& v : validate_theorem_setting(pop, g)) {
    report.preconditions[v.condition] = false;
  }
}

double threshold(const ProcedureOutcome& out, std::string_view group,
                 std::string_view region) {
  return out.thresholds.at(Cell{std::string(group), std::string(region)}).value();
}

}  // namespace

std::string_view to_string(TheoremId id) {
  switch (id) {
    case TheoremId::kQuota: return "T1";
    case TheoremId::kPlusFactor: return "T2";
    case TheoremId::kTopPercentage: return "T3";
  }
  return "unknown";
}

bool TheoremReport::covered() const {
  for (const auto& [name, met] : preconditions) {
    if (!met) return false;
  }
  return true;
}

TheoremReport check_theorem1(const Population& pop, const Capacity& g, double eta_quota) {
  require_theorem_setting(pop);
  TheoremReport report;
  report.theorem = TheoremId::kQuota;
  add_setting_preconditions(pop, g, report);

  const ProcedureOutcome quota = solve_quota(pop, g, eta_quota);
  const double eta_prime = *quota.eta_quota_prime;
  const double rhs = eta_prime > 0.0 ? eta_quota / eta_prime : kInf;
  const double lhs = cdf_ratio_sup(pop.dist(kRich), pop.dist(kPoor));

  const double q_urm_poor = threshold(quota, kUrm, kPoor);
  const double q_urm_rich = threshold(quota, kUrm, kRich);
  const double q_non_poor = threshold(quota, kNonUrm, kPoor);
  const double q_non_rich = threshold(quota, kNonUrm, kRich);

  report.witness["eta_quota"] = eta_quota;
  report.witness["eta_quota_prime"] = eta_prime;
  report.witness["ratio_sup"] = lhs;
  report.witness["ratio_bound"] = rhs;
  report.witness["q_URM_poor"] = q_urm_poor;
  report.witness["q_URM_rich"] = q_urm_rich;
  report.witness["q_nonURM_poor"] = q_non_poor;
  report.witness["q_nonURM_rich"] = q_non_rich;
  report.witness["ordering_margin"] = q_urm_rich - q_non_poor;

  // lhs < rhs strictly; lhs == rhs == inf counts as not strict.
  const bool bound_fails = std::isfinite(lhs) && rhs - lhs > kStrictMargin;
  report.preconditions["ratio_sup_below_bound"] = bound_fails;
  report.conclusion_holds = q_urm_rich - q_non_poor > kStrictMargin;
  if (!bound_fails) {
    report.note = "sup ratio meets the bound; ordering is not forced";
  }
  return report;
}

TheoremReport check_theorem2(const Population& pop, const Capacity& g, double eta_dagger) {
  require_theorem_setting(pop);
  const GammaParams& poor = pop.dist(kPoor);
  const GammaParams& rich = pop.dist(kRich);
  if (poor.shape() != rich.shape()) {
    raise(ErrorKind::kUnsupported,
          "plus-factor check requires equal shapes in both regions");
  }
  TheoremReport report;
  report.theorem = TheoremId::kPlusFactor;
  add_setting_preconditions(pop, g, report);

  const double k = poor.shape();
  const ProcedureOutcome plus = solve_plus_factor(pop, g, eta_dagger);
  const double q_o = *plus.q_default;
  const double q_dagger = *plus.q_dagger;
  const double q_urm = q_dagger / eta_dagger;

  double q_tilde = kInf;
  double eta_lower = 0.0;
  if (poor.scale() != rich.scale()) {
    q_tilde = pdf_intersection(k, poor.scale(), rich.scale()).value();
    eta_lower = q_o / q_tilde;
  } else {
    report.note = "equal scales: densities never cross";
  }

  const double gain_rich =
      gamma_cdf(rich, LogScore(q_urm)) - gamma_cdf(rich, LogScore(q_o));
  const double gain_poor =
      gamma_cdf(poor, LogScore(q_urm)) - gamma_cdf(poor, LogScore(q_o));

  report.witness["q_default"] = q_o;
  report.witness["q_dagger"] = q_dagger;
  report.witness["q_dagger_over_eta"] = q_urm;
  report.witness["q_tilde"] = q_tilde;
  report.witness["eta_dagger"] = eta_dagger;
  report.witness["eta_lower_bound"] = eta_lower;
  report.witness["gain_rich"] = gain_rich;
  report.witness["gain_poor"] = gain_poor;
  report.witness["conclusion_margin"] = gain_rich - gain_poor;

  report.preconditions["capacity_below_intersection"] =
      std::isfinite(q_tilde) && q_tilde - q_o > kStrictMargin;
  // Interval [lower, 1); eta == 1 is the identity and excluded.
  report.preconditions["eta_in_range"] =
      eta_dagger >= eta_lower && eta_dagger < 1.0 - kStrictMargin;
  report.conclusion_holds = gain_rich - gain_poor > kStrictMargin;
  if (eta_dagger == 1.0) report.note = "eta_dagger = 1 is the identity: both gains are 0";
  return report;
}

TheoremReport check_theorem3(const Population& pop, const Capacity& g) {
  require_theorem_setting(pop);
  TheoremReport report;
  report.theorem = TheoremId::kTopPercentage;
  add_setting_preconditions(pop, g, report);

  const GammaParams& poor = pop.dist(kPoor);
  const GammaParams& rich = pop.dist(kRich);
  const auto& t = pop.table();
  const double n_poor = t.region_total(*t.region_index(kPoor));
  const double n_rich = t.region_total(*t.region_index(kRich));

  const double q_o = solve_default_threshold(pop, g);
  const ProcedureOutcome top = solve_top_percentage(pop, g);
  const double q_poor = top.region_thresholds.at(std::string(kPoor));
  const double q_rich = top.region_thresholds.at(std::string(kRich));

  const double poor_gain =
      n_poor * (gamma_cdf(poor, LogScore(q_poor)) - gamma_cdf(poor, LogScore(q_o)));
  const double rich_loss =
      n_rich * (gamma_cdf(rich, LogScore(q_o)) - gamma_cdf(rich, LogScore(q_rich)));
  const double residual = poor_gain - rich_loss;
  const double tolerance = 1e-8 * pop.total();

  report.witness["q_default"] = q_o;
  report.witness["q_poor"] = q_poor;
  report.witness["q_rich"] = q_rich;
  report.witness["poor_gain"] = poor_gain;
  report.witness["rich_loss"] = rich_loss;
  report.witness["conservation_residual"] = residual;
  report.witness["conservation_tolerance"] = tolerance;

  bool holds = std::abs(residual) <= tolerance;
  if (poor.shape() == rich.shape()) {
    const double ratio = q_poor / q_rich;
    const double expected = poor.scale() / rich.scale();
    const double rel_err = std::abs(ratio - expected) / expected;
    report.witness["threshold_ratio"] = ratio;
    report.witness["scale_ratio"] = expected;
    report.witness["threshold_ratio_rel_error"] = rel_err;
    holds = holds && rel_err <= 1e-10;
  }
  report.conclusion_holds = holds;
  return report;
}

}  // namespace admitsim
