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

#include "admitsim/procedures.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "admitsim/errors.h"

namespace admitsim {
namespace {

// Bisection for the smallest q with admits(q) = g, where admits is
// continuous and non-decreasing with admits(0) = 0 < g < admits(inf).
double solve_capacity_root(const std::function<double(double)>& admits, double g,
                           double start) {
  double lo = 0.0;
  double hi = start;
  for (int i = 0; admits(hi) < g; ++i) {
    if (i > 2000) raise(ErrorKind::kCapacity, "capacity root could not be bracketed");
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 4000; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= 1e-15 * hi) break;
    if (admits(mid) < g) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double max_mean(const Population& pop) {
  double m = 0.0;
  for (const auto& d : pop.region_dists()) m = std::max(m, d.mean());
  return m;
}

// Quantile that also accepts the boundary prob == 0 (threshold 0, no admits).
LogScore threshold_for_probability(const GammaParams& dist, double prob,
                                   std::string_view what) {
  if (prob <= 0.0) return LogScore::zero();
  // Exactly 1 (up to rounding of g * eta / n) admits the whole group.
  if (prob > 1.0 + 1e-12) {
    std::ostringstream msg;
    msg << what << " target admit probability " << prob << " exceeds 1";
    raise(ErrorKind::kInfeasibleQuota, msg.str());
  }
  if (prob >= 1.0) return LogScore::infinity();
  return gamma_quantile(dist, prob);
}

void fill_cells(const Population& pop, ProcedureOutcome& out) {
  const auto& t = pop.table();
  for (std::size_t g = 0; g < t.groups().size(); ++g) {
    for (std::size_t r = 0; r < t.regions().size(); ++r) {
      const Cell cell{t.groups()[g], t.regions()[r]};
      const LogScore q = out.thresholds.at(cell);
      const double p = gamma_cdf(pop.dist(r), q);
      out.admit_prob.insert_or_assign(cell, p);
      out.admit_count.insert_or_assign(cell, t.count(g, r) * p);
    }
  }
}

void set_threshold(ProcedureOutcome& out, const std::string& group,
                   const std::string& region, LogScore q) {
  out.thresholds.insert_or_assign(Cell{group, region}, q);
}

}  // namespace

std::string_view to_string(ProcedureKind kind) {
  switch (kind) {
    case ProcedureKind::kDefault: return "default";
    case ProcedureKind::kQuota: return "quota";
    case ProcedureKind::kPlusFactor: return "plus-factor";
    case ProcedureKind::kTopPercentage: return "top-percentage";
  }
  return "unknown";
}

std::optional<ProcedureKind> parse_procedure_kind(std::string_view name) {
  for (auto kind : {ProcedureKind::kDefault, ProcedureKind::kQuota,
                    ProcedureKind::kPlusFactor, ProcedureKind::kTopPercentage}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

bool procedure_takes_eta(ProcedureKind kind) {
  return kind == ProcedureKind::kQuota || kind == ProcedureKind::kPlusFactor;
}

double ProcedureOutcome::total_admits() const {
  double sum = 0.0;
  for (const auto& [cell, count] : admit_count) sum += count;
  return sum;
}

double ProcedureOutcome::group_admits(std::string_view group) const {
  double sum = 0.0;
  for (const auto& [cell, count] : admit_count) {
    if (cell.group == group) sum += count;
  }
  return sum;
}

double solve_default_threshold(const Population& pop, const Capacity& g) {
  check_capacity(pop, g);
  const auto& t = pop.table();
  std::vector<double> region_n(t.regions().size());
  for (std::size_t r = 0; r < region_n.size(); ++r) region_n[r] = t.region_total(r);
  auto admits = [&](double q) {
    double sum = 0.0;
    for (std::size_t r = 0; r < region_n.size(); ++r) {
      sum += region_n[r] * gamma_cdf(pop.dist(r), LogScore(q));
    }
    return sum;
  };
  return solve_capacity_root(admits, g.value(), max_mean(pop));
}

double quota_eta_max(const Population& pop) {
  require_two_groups(pop);
  const auto& t = pop.table();
  const double n_urm = t.group_total(*t.group_index(kUrm));
  if (!(n_urm > 0.0)) raise(ErrorKind::kArgument, "quota needs URM applicants");
  return pop.total() / n_urm;
}

double quota_eta_prime(const Population& pop, double eta_quota) {
  require_two_groups(pop);
  const auto& t = pop.table();
  const double n_urm = t.group_total(*t.group_index(kUrm));
  const double n_non = t.group_total(*t.group_index(kNonUrm));
  if (!(n_non > 0.0)) raise(ErrorKind::kArgument, "quota needs nonURM applicants");
  const double eta_prime = (pop.total() - eta_quota * n_urm) / n_non;
  // At the upper end of the range the subtraction can leave a few ulps.
  if (eta_prime < 0.0 && eta_prime > -1e-12) return 0.0;
  return eta_prime;
}

ProcedureOutcome solve_default(const Population& pop, const Capacity& g) {
  ProcedureOutcome out;
  out.procedure = ProcedureKind::kDefault;
  out.capacity = g.value();
  const double q_o = solve_default_threshold(pop, g);
  out.q_default = q_o;
  for (const auto& group : pop.table().groups()) {
    for (const auto& region : pop.table().regions()) {
      set_threshold(out, group, region, LogScore(q_o));
    }
  }
  fill_cells(pop, out);
  return out;
}

ProcedureOutcome solve_quota(const Population& pop, const Capacity& g, double eta_quota) {
  require_two_groups(pop);
  check_capacity(pop, g);
  const double eta_max = quota_eta_max(pop);
  if (!(eta_quota >= 1.0) || eta_quota > eta_max * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "eta_quota = " << eta_quota << " outside [1, " << eta_max << "]";
    raise(ErrorKind::kArgument, msg.str());
  }
  const double eta_prime = quota_eta_prime(pop, eta_quota);
  const double n = pop.total();
  const double p_urm = g.value() * eta_quota / n;
  const double p_non = g.value() * eta_prime / n;

  ProcedureOutcome out;
  out.procedure = ProcedureKind::kQuota;
  out.capacity = g.value();
  out.eta = eta_quota;
  out.eta_quota_prime = eta_prime;
  const auto& regions = pop.table().regions();
  for (std::size_t r = 0; r < regions.size(); ++r) {
    set_threshold(out, std::string(kUrm), regions[r],
                  threshold_for_probability(pop.dist(r), p_urm, "URM quota"));
    set_threshold(out, std::string(kNonUrm), regions[r],
                  threshold_for_probability(pop.dist(r), p_non, "nonURM remainder"));
  }
  fill_cells(pop, out);
  return out;
}

ProcedureOutcome solve_plus_factor(const Population& pop, const Capacity& g,
                                   double eta_dagger) {
  require_two_groups(pop);
  check_capacity(pop, g);
  if (!(eta_dagger > 0.0 && eta_dagger <= 1.0)) {
    std::ostringstream msg;
    msg << "eta_dagger = " << eta_dagger << " outside (0, 1]";
    raise(ErrorKind::kArgument, msg.str());
  }
  const auto& t = pop.table();
  const std::size_t urm = *t.group_index(kUrm);
  const std::size_t non = *t.group_index(kNonUrm);
  const std::size_t num_regions = t.regions().size();

  // Evaluating F_dagger(q) = F(q / eta) on the original scale.
  auto admits = [&](double q) {
    double sum = 0.0;
    for (std::size_t r = 0; r < num_regions; ++r) {
      sum += t.count(urm, r) * gamma_cdf(pop.dist(r), LogScore(q / eta_dagger));
      sum += t.count(non, r) * gamma_cdf(pop.dist(r), LogScore(q));
    }
    return sum;
  };

  ProcedureOutcome out;
  out.procedure = ProcedureKind::kPlusFactor;
  out.capacity = g.value();
  out.eta = eta_dagger;
  const double q_o = solve_default_threshold(pop, g);
  const double q_dagger =
      eta_dagger == 1.0 ? q_o : solve_capacity_root(admits, g.value(), max_mean(pop));
  out.q_default = q_o;
  out.q_dagger = q_dagger;
  for (std::size_t r = 0; r < num_regions; ++r) {
    set_threshold(out, t.groups()[urm], t.regions()[r], LogScore(q_dagger / eta_dagger));
    set_threshold(out, t.groups()[non], t.regions()[r], LogScore(q_dagger));
  }
  fill_cells(pop, out);
  return out;
}

ProcedureOutcome solve_top_percentage(const Population& pop, const Capacity& g) {
  check_capacity(pop, g);
  ProcedureOutcome out;
  out.procedure = ProcedureKind::kTopPercentage;
  out.capacity = g.value();
  const double p = g.value() / pop.total();
  const auto& t = pop.table();
  for (std::size_t r = 0; r < t.regions().size(); ++r) {
    const LogScore q = gamma_quantile(pop.dist(r), p);
    out.region_thresholds[t.regions()[r]] = q.value();
    for (const auto& group : t.groups()) set_threshold(out, group, t.regions()[r], q);
  }
  fill_cells(pop, out);
  return out;
}

ProcedureOutcome solve(const Population& pop, const Capacity& g, const ProcedureSpec& spec) {
  if (procedure_takes_eta(spec.kind) && !spec.eta) {
    raise(ErrorKind::kArgument,
          std::string("procedure '") + std::string(to_string(spec.kind)) + "' needs eta");
  }
  if (!procedure_takes_eta(spec.kind) && spec.eta) {
    raise(ErrorKind::kArgument, std::string("procedure '") +
                                    std::string(to_string(spec.kind)) +
                                    "' does not take eta");
  }
  switch (spec.kind) {
    case ProcedureKind::kDefault: return solve_default(pop, g);
    case ProcedureKind::kQuota: return solve_quota(pop, g, *spec.eta);
    case ProcedureKind::kPlusFactor: return solve_plus_factor(pop, g, *spec.eta);
    case ProcedureKind::kTopPercentage: return solve_top_percentage(pop, g);
  }
  raise(ErrorKind::kArgument, "unknown procedure");
}

LogScore pdf_intersection(double shape, double theta_poor, double theta_rich) {
  if (!(shape > 0.0) || !(theta_poor > 0.0) || !(theta_rich > 0.0)) {
    raise(ErrorKind::kDomain, "pdf_intersection: parameters must be positive");
  }
  if (theta_poor == theta_rich) {
    raise(ErrorKind::kDegenerate, "pdf_intersection: equal scales have no unique crossing");
  }
  return LogScore(shape * std::log(theta_poor / theta_rich) /
                  (1.0 / theta_rich - 1.0 / theta_poor));
}

}  // namespace admitsim
