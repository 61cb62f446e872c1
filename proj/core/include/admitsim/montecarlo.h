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

#ifndef ADMITSIM_MONTECARLO_H_
#define ADMITSIM_MONTECARLO_H_

// Stochastic replay of the analytic model. Individuals are drawn per
// (group, region) cell from the region's Gamma distribution and admitted
// iff their log score is <= the cell threshold.
//
// Reproducibility: every cell owns a std::mt19937_64 seeded with
// splitmix64(seed ^ splitmix64(cell_index + 1)), cell_index = g * R + r.
// Uniform, normal and Gamma variates are produced by this library rather
// than by <random> distributions, whose algorithms are implementation
// defined. Equal seeds give identical cohorts for any thread count.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "admitsim/gamma.h"
#include "admitsim/population.h"
#include "admitsim/procedures.h"

namespace admitsim {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of the generator for cell (group, region).
std::uint64_t cell_seed(std::uint64_t seed, std::size_t cell_index) noexcept;

class GammaSampler {
 public:
  explicit GammaSampler(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via the Marsaglia polar method.
  double normal();
  /// Marsaglia-Tsang squeeze for shape >= 1; shape < 1 uses the
  /// Gamma(k + 1) * U^(1/k) boost.
  double gamma(const GammaParams& p);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct CohortRecord {
  std::uint32_t group;
  std::uint32_t region;
  double q;
};

/// Sampled applicants, ordered by cell (group-major) then draw index.
struct Cohort {
  std::vector<std::string> groups;
  std::vector<std::string> regions;
  std::vector<CohortRecord> records;
  std::uint64_t seed = 0;
  std::size_t replication = 1;

  /// Records in cell (group, region).
  std::size_t cell_size(std::size_t group, std::size_t region) const;
};

/// Number of individuals drawn for a count: llround(n) * replication.
std::size_t cell_sample_size(double count, std::size_t replication);

/// Cells are sampled on up to `threads` worker threads (0 = hardware).
Cohort sample_cohort(const Population& pop, std::uint64_t seed, std::size_t replication,
                     unsigned threads = 1);

struct ReplayTally {
  CellMap<std::size_t> admitted;
  CellMap<std::size_t> size;
  std::size_t total_admitted = 0;
};

ReplayTally replay_tally(const Cohort& cohort, const ProcedureOutcome& outcome);

/// Per-cell fraction of sampled individuals with q <= threshold. Cells with
/// no individuals report 0.
CellMap<double> replay_procedure(const Cohort& cohort, const ProcedureOutcome& outcome);

/// CSV with header "group,region,q,raw_score"; numbers in shortest
/// round-trip form.
void write_cohort_csv(const Cohort& cohort, const ScoreScale& scale, const std::string& path);

}  // namespace admitsim

#endif  // ADMITSIM_MONTECARLO_H_
