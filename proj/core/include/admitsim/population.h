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

#ifndef ADMITSIM_POPULATION_H_
#define ADMITSIM_POPULATION_H_

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "admitsim/gamma.h"

namespace admitsim {

// Canonical labels of the two-group, two-region setting the theorems use.
inline constexpr std::string_view kUrm = "URM";
inline constexpr std::string_view kNonUrm = "nonURM";
inline constexpr std::string_view kPoor = "poor";
inline constexpr std::string_view kRich = "rich";

/// A (group, region) cell of the demographic table.
struct Cell {
  std::string group;
  std::string region;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

template <typename V>
using CellMap = std::map<Cell, V>;

using ThresholdMap = CellMap<LogScore>;

/// Applicant counts n_a^(r). Counts are non-negative reals; fitted
/// compositions are not integral.
class DemographicTable {
 public:
  struct Entry {
    std::string group;
    std::string region;
    double count;
  };

  /// `counts` is row-major: counts[g * regions.size() + r].
  DemographicTable(std::vector<std::string> groups, std::vector<std::string> regions,
                   std::vector<double> counts);

  /// Groups and regions are ordered by first appearance. Every
  /// (group, region) combination must appear exactly once.
  static DemographicTable from_entries(std::span<const Entry> entries);

  const std::vector<std::string>& groups() const noexcept { return groups_; }
  const std::vector<std::string>& regions() const noexcept { return regions_; }

  std::optional<std::size_t> group_index(std::string_view group) const;
  std::optional<std::size_t> region_index(std::string_view region) const;

  double count(std::size_t group, std::size_t region) const {
    return counts_[group * regions_.size() + region];
  }
  /// Raises an argument error for unknown labels.
  double count(std::string_view group, std::string_view region) const;

  double total() const noexcept { return total_; }
  double group_total(std::size_t group) const;
  double region_total(std::size_t region) const;

  std::vector<Entry> entries() const;

 private:
  std::vector<std::string> groups_;
  std::vector<std::string> regions_;
  std::vector<double> counts_;
  double total_ = 0.0;
};

/// Applicant population. Score distributions are attached to regions only;
/// there is no slot for a per-group distribution.
class Population {
 public:
  /// `region_dists[r]` belongs to `table.regions()[r]`.
  Population(DemographicTable table, std::vector<GammaParams> region_dists,
             ScoreScale scale);
  Population(DemographicTable table, std::initializer_list<GammaParams> region_dists,
             ScoreScale scale)
      : Population(std::move(table), std::vector<GammaParams>(region_dists), scale) {}
  Population(DemographicTable table, const std::map<std::string, GammaParams>& region_dists,
             ScoreScale scale);

  const DemographicTable& table() const noexcept { return table_; }
  const ScoreScale& scale() const noexcept { return scale_; }
  const std::vector<GammaParams>& region_dists() const noexcept { return dists_; }
  const GammaParams& dist(std::size_t region) const { return dists_.at(region); }
  const GammaParams& dist(std::string_view region) const;

  double total() const noexcept { return table_.total(); }

 private:
  DemographicTable table_;
  std::vector<GammaParams> dists_;
  ScoreScale scale_;
};

/// Selective-college seats g > 0. The g < n check happens against a
/// population (see check_capacity).
class Capacity {
 public:
  explicit Capacity(double g);
  double value() const noexcept { return g_; }

 private:
  double g_;
};

/// Raises a capacity error unless 0 < g < n.
void check_capacity(const Population& pop, const Capacity& g);

struct AssumptionViolation {
  std::string condition;
  std::string detail;
};

// Condition names reported by validate_theorem_setting.
inline constexpr std::string_view kHistoricalDisproportion = "historical_disproportion";
inline constexpr std::string_view kUrmMinority = "urm_minority";
inline constexpr std::string_view kCdfDominance = "cdf_dominance";
inline constexpr std::string_view kLimitedCapacity = "limited_capacity";

/// Raises a structure error unless the groups are exactly {URM, nonURM}
/// and the regions exactly {poor, rich}.
void require_theorem_setting(const Population& pop);

/// Raises a structure error unless the groups are exactly {URM, nonURM}.
/// Regions are unrestricted.
void require_two_groups(const Population& pop);

/// Lists violated modelling assumptions (empty when all hold):
///   n_a^poor / n_a'^poor > n_a^rich / n_a'^rich   (strict; equality violates)
///   n_a^poor + n_a^rich < n_a'^poor + n_a'^rich
///   F_rich >= F_poor everywhere
///   g < n
std::vector<AssumptionViolation> validate_theorem_setting(const Population& pop,
                                                          const Capacity& g);

/// Sum over cells of n_a^(r) * F^(r)(threshold of the cell).
double expected_admits(const Population& pop, const ThresholdMap& thresholds);

}  // namespace admitsim

#endif  // ADMITSIM_POPULATION_H_
