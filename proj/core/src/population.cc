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

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "admitsim/errors.h"

namespace admitsim {
namespace {

void check_labels(const std::vector<std::string>& labels, std::string_view what) {
  if (labels.empty()) {
    raise(ErrorKind::kValidation, std::string("population needs at least one ") +
                                      std::string(what));
  }
  std::set<std::string> seen;
  for (const auto& label : labels) {
    if (label.empty()) {
      raise(ErrorKind::kValidation, std::string("empty ") + std::string(what) + " label");
    }
    if (!seen.insert(label).second) {
      raise(ErrorKind::kValidation,
            "duplicate " + std::string(what) + " label '" + label + "'");
    }
  }
}

std::optional<std::size_t> find_label(const std::vector<std::string>& labels,
                                      std::string_view label) {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels.begin());
}

}  // namespace

DemographicTable::DemographicTable(std::vector<std::string> groups,
                                   std::vector<std::string> regions,
                                   std::vector<double> counts)
    : groups_(std::move(groups)), regions_(std::move(regions)), counts_(std::move(counts)) {
  check_labels(groups_, "group");
  check_labels(regions_, "region");
  if (counts_.size() != groups_.size() * regions_.size()) {
    raise(ErrorKind::kValidation, "count table size does not match groups x regions");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    const double n = counts_[i];
    if (!(n >= 0.0) || !std::isfinite(n)) {
      std::ostringstream msg;
      msg << "count for (" << groups_[i / regions_.size()] << ", "
          << regions_[i % regions_.size()] << ") must be finite and >= 0, got " << n;
      raise(ErrorKind::kValidation, msg.str());
    }
    total_ += n;
  }
}

DemographicTable DemographicTable::from_entries(std::span<const Entry> entries) {
  std::vector<std::string> groups;
  std::vector<std::string> regions;
  for (const auto& e : entries) {
    if (!find_label(groups, e.group)) groups.push_back(e.group);
    if (!find_label(regions, e.region)) regions.push_back(e.region);
  }
  std::vector<double> counts(groups.size() * regions.size(), 0.0);
  std::vector<bool> filled(counts.size(), false);
  for (const auto& e : entries) {
    const std::size_t idx =
        *find_label(groups, e.group) * regions.size() + *find_label(regions, e.region);
    if (filled[idx]) {
      raise(ErrorKind::kValidation,
            "duplicate count for (" + e.group + ", " + e.region + ")");
    }
    filled[idx] = true;
    counts[idx] = e.count;
  }
  for (std::size_t i = 0; i < filled.size(); ++i) {
    if (!filled[i]) {
      raise(ErrorKind::kValidation, "missing count for (" + groups[i / regions.size()] +
                                        ", " + regions[i % regions.size()] + ")");
    }
  }
  return DemographicTable(std::move(groups), std::move(regions), std::move(counts));
}

std::optional<std::size_t> DemographicTable::group_index(std::string_view group) const {
  return find_label(groups_, group);
}

std::optional<std::size_t> DemographicTable::region_index(std::string_view region) const {
  return find_label(regions_, region);
}

double DemographicTable::count(std::string_view group, std::string_view region) const {
  auto g = group_index(group);
  auto r = region_index(region);
  if (!g || !r) {
    raise(ErrorKind::kArgument, "unknown cell (" + std::string(group) + ", " +
                                    std::string(region) + ")");
  }
  return count(*g, *r);
}

double DemographicTable::group_total(std::size_t group) const {
  double sum = 0.0;
  for (std::size_t r = 0; r < regions_.size(); ++r) sum += count(group, r);
  return sum;
}

double DemographicTable::region_total(std::size_t region) const {
  double sum = 0.0;
  for (std::size_t g = 0; g < groups_.size(); ++g) sum += count(g, region);
  return sum;
}

std::vector<DemographicTable::Entry> DemographicTable::entries() const {
  std::vector<Entry> out;
  out.reserve(counts_.size());
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    for (std::size_t r = 0; r < regions_.size(); ++r) {
      out.push_back({groups_[g], regions_[r], count(g, r)});
    }
  }
  return out;
}

Population::Population(DemographicTable table, std::vector<GammaParams> region_dists,
                       ScoreScale scale)
    : table_(std::move(table)), dists_(std::move(region_dists)), scale_(scale) {
  if (dists_.size() != table_.regions().size()) {
    raise(ErrorKind::kValidation,
          "population needs exactly one score distribution per region");
  }
}

Population::Population(DemographicTable table,
                       const std::map<std::string, GammaParams>& region_dists,
                       ScoreScale scale)
    : table_(std::move(table)), scale_(scale) {
  if (region_dists.size() != table_.regions().size()) {
    raise(ErrorKind::kValidation,
          "region distributions must be keyed by exactly the table's regions");
  }
  dists_.reserve(region_dists.size());
  for (const auto& region : table_.regions()) {
    auto it = region_dists.find(region);
    if (it == region_dists.end()) {
      raise(ErrorKind::kValidation, "no score distribution for region '" + region + "'");
    }
    dists_.push_back(it->second);
  }
}

const GammaParams& Population::dist(std::string_view region) const {
  auto r = table_.region_index(region);
  if (!r) raise(ErrorKind::kArgument, "unknown region '" + std::string(region) + "'");
  return dists_[*r];
}

Capacity::Capacity(double g) : g_(g) {
  if (!(g > 0.0) || !std::isfinite(g)) {
    std::ostringstream msg;
    msg << "capacity must be positive and finite, got " << g;
    raise(ErrorKind::kCapacity, msg.str());
  }
}

void check_capacity(const Population& pop, const Capacity& g) {
  if (!(g.value() < pop.total())) {
    std::ostringstream msg;
    msg << "capacity g = " << g.value() << " must be below the applicant total n = "
        << pop.total();
    raise(ErrorKind::kCapacity, msg.str());
  }
}

void require_two_groups(const Population& pop) {
  const auto& groups = pop.table().groups();
  const bool ok = groups.size() == 2 && pop.table().group_index(kUrm) &&
                  pop.table().group_index(kNonUrm);
  if (!ok) {
    raise(ErrorKind::kStructure, "expected exactly the groups {URM, nonURM}");
  }
}

void require_theorem_setting(const Population& pop) {
  require_two_groups(pop);
  const auto& regions = pop.table().regions();
  const bool ok = regions.size() == 2 && pop.table().region_index(kPoor) &&
                  pop.table().region_index(kRich);
  if (!ok) {
    raise(ErrorKind::kStructure, "expected exactly the regions {poor, rich}");
  }
}

std::vector<AssumptionViolation> validate_theorem_setting(const Population& pop,
                                                          const Capacity& g) {
  require_theorem_setting(pop);
  const auto& t = pop.table();
  const double a_poor = t.count(kUrm, kPoor);
  const double a_rich = t.count(kUrm, kRich);
  const double b_poor = t.count(kNonUrm, kPoor);
  const double b_rich = t.count(kNonUrm, kRich);

  std::vector<AssumptionViolation> out;
  // a_poor / b_poor > a_rich / b_rich, cross-multiplied (counts are >= 0).
  if (!(a_poor * b_rich > a_rich * b_poor)) {
    std::ostringstream msg;
    msg << "URM/nonURM ratio in poor region (" << a_poor << "/" << b_poor
        << ") is not strictly above that of the rich region (" << a_rich << "/"
        << b_rich << ")";
    out.push_back({std::string(kHistoricalDisproportion), msg.str()});
  }
  if (!(a_poor + a_rich < b_poor + b_rich)) {
    std::ostringstream msg;
    msg << "URM total " << a_poor + a_rich << " is not below nonURM total "
        << b_poor + b_rich;
    out.push_back({std::string(kUrmMinority), msg.str()});
  }

  const GammaParams& rich = pop.dist(kRich);
  const GammaParams& poor = pop.dist(kPoor);
  const double lo = 1e-6 * std::min(rich.scale(), poor.scale());
  const double hi = 50.0 * std::max(rich.mean(), poor.mean());
  const auto grid = log_spaced_grid(lo, hi, 2048);
  if (!cdf_dominates_asymptotically(rich, poor) || !cdf_dominates(rich, poor, grid)) {
    std::ostringstream msg;
    msg << "rich-region CDF (k=" << rich.shape() << ", theta=" << rich.scale()
        << ") does not dominate poor-region CDF (k=" << poor.shape()
        << ", theta=" << poor.scale() << ")";
    out.push_back({std::string(kCdfDominance), msg.str()});
  }
  if (!(g.value() < pop.total())) {
    std::ostringstream msg;
    msg << "capacity g = " << g.value() << " is not below n = " << pop.total();
    out.push_back({std::string(kLimitedCapacity), msg.str()});
  }
  return out;
}

double expected_admits(const Population& pop, const ThresholdMap& thresholds) {
  const auto& t = pop.table();
  double sum = 0.0;
  for (std::size_t g = 0; g < t.groups().size(); ++g) {
    for (std::size_t r = 0; r < t.regions().size(); ++r) {
      auto it = thresholds.find(Cell{t.groups()[g], t.regions()[r]});
      if (it == thresholds.end()) {
        raise(ErrorKind::kArgument, "missing threshold for cell (" + t.groups()[g] +
                                        ", " + t.regions()[r] + ")");
      }
      sum += t.count(g, r) * gamma_cdf(pop.dist(r), it->second);
    }
  }
  return sum;
}

}  // namespace admitsim
