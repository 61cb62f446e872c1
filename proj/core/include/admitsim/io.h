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

#ifndef ADMITSIM_IO_H_
#define ADMITSIM_IO_H_

// File formats.
//
// Population (JSON, "version": 1):
//   { "version": 1,
//     "scale":    { "s_min": 0, "s_max": 4 },
//     "capacity": { "g": 50 },                       (optional)
//     "regions":  [ { "id": "poor", "shape": 2, "scale_param": 0.3 }, ... ],
//     "counts":   [ { "group": "URM", "region": "poor", "n": 30 }, ... ] }
//
// Summary statistics (two CSV files, UTF-8, '.' decimal point):
//   groups:    group,applicants,admits
//   quantiles: gpa_cut,applicant_frac_at_or_above,admit_frac_at_or_above
//
// Report bundle (JSON, "version": 1): whatever a command produced, i.e.
// population, procedure outcomes, theorem reports, Monte Carlo rates, fit
// solution and plot-ready density grids. Doubles are written in shortest
// round-trip form; non-finite values as the strings "inf", "-inf", "nan".
// Keys are sorted, so equal bundles serialize to identical bytes.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "admitsim/fitter.h"
#include "admitsim/population.h"
#include "admitsim/procedures.h"
#include "admitsim/theorems.h"

namespace admitsim {

inline constexpr int kFormatVersion = 1;

struct PopulationFile {
  Population population;
  std::optional<Capacity> capacity;
};

PopulationFile parse_population_text(std::string_view text, std::string_view source = "<text>");
PopulationFile parse_population(const std::string& path);
std::string population_to_text(const PopulationFile& file);
void write_population(const PopulationFile& file, const std::string& path);

SummaryStats parse_summary_stats_text(std::string_view groups_csv,
                                      std::string_view quantiles_csv, const ScoreScale& scale);
/// Quantile points come back sorted by descending cut.
SummaryStats parse_summary_stats(const std::string& groups_path,
                                 const std::string& quantiles_path, const ScoreScale& scale);
void write_summary_stats(const SummaryStats& stats, const std::string& groups_path,
                         const std::string& quantiles_path);

/// Region and overall densities on a log-spaced q grid, with the matching
/// raw scores for plotting on the original scale.
struct DensityGrid {
  std::vector<double> q;
  std::vector<double> raw_score;
  std::vector<std::string> regions;
  std::vector<std::vector<double>> region_density;
  /// Count-weighted mixture of the region densities.
  std::vector<double> overall;
};

inline constexpr std::size_t kDensityGridPoints = 512;

/// Grid on [1e-4, largest 99.9% quantile over regions].
DensityGrid make_density_grid(const Population& pop,
                              std::size_t points = kDensityGridPoints);

double trapezoid(std::span<const double> x, std::span<const double> y);

struct EmpiricalRates {
  std::uint64_t seed = 0;
  std::size_t replication = 1;
  CellMap<double> rate;
  CellMap<std::size_t> admitted;
  CellMap<std::size_t> size;
};

struct ReportBundle {
  /// Producing command: "solve", "check", "simulate", "fit" or "report".
  std::string source;
  std::optional<PopulationFile> population;
  std::vector<ProcedureOutcome> outcomes;
  std::vector<TheoremReport> theorems;
  std::optional<EmpiricalRates> empirical;
  std::optional<FitSolution> fit;
  std::optional<DensityGrid> density;
};

std::string report_to_text(const ReportBundle& bundle);
ReportBundle report_from_text(std::string_view text, std::string_view source = "<text>");
void emit_report(const ReportBundle& bundle, const std::string& path);
ReportBundle parse_report(const std::string& path);

/// Shortest decimal that round-trips, independent of the C locale.
std::string format_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace admitsim

#endif  // ADMITSIM_IO_H_
