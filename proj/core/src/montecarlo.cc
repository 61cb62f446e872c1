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

#include "admitsim/montecarlo.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <charconv>
#include <fstream>
#include <thread>

#include "admitsim/errors.h"

namespace admitsim {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t cell_seed(std::uint64_t seed, std::size_t cell_index) noexcept {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(cell_index) + 1));
}

double GammaSampler::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double GammaSampler::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

double GammaSampler::gamma(const GammaParams& p) {
  const double k = p.shape();
  if (k < 1.0) {
    const double boosted = gamma(GammaParams(k + 1.0, 1.0));
    return p.scale() * boosted * std::pow(uniform(), 1.0 / k);
  }
  const double d = k - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return p.scale() * d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return p.scale() * d * v;
  }
}

std::size_t Cohort::cell_size(std::size_t group, std::size_t region) const {
  return static_cast<std::size_t>(std::count_if(
      records.begin(), records.end(), [&](const CohortRecord& rec) {
        return rec.group == group && rec.region == region;
      }));
}

std::size_t cell_sample_size(double count, std::size_t replication) {
  return static_cast<std::size_t>(std::llround(count)) * replication;
}

Cohort sample_cohort(const Population& pop, std::uint64_t seed, std::size_t replication,
                     unsigned threads) {
  if (replication < 1) raise(ErrorKind::kArgument, "replication must be >= 1");
  const auto& t = pop.table();
  const std::size_t num_regions = t.regions().size();
  const std::size_t num_cells = t.groups().size() * num_regions;

  Cohort cohort;
  cohort.groups = t.groups();
  cohort.regions = t.regions();
  cohort.seed = seed;
  cohort.replication = replication;

  std::vector<std::size_t> offsets(num_cells + 1, 0);
  for (std::size_t c = 0; c < num_cells; ++c) {
    offsets[c + 1] =
        offsets[c] + cell_sample_size(t.count(c / num_regions, c % num_regions), replication);
  }
  cohort.records.resize(offsets.back());

  auto fill_cell = [&](std::size_t c) {
    const std::size_t g = c / num_regions;
    const std::size_t r = c % num_regions;
    GammaSampler sampler(cell_seed(seed, c));
    const GammaParams& dist = pop.dist(r);
    for (std::size_t i = offsets[c]; i < offsets[c + 1]; ++i) {
      cohort.records[i] = CohortRecord{static_cast<std::uint32_t>(g),
                                       static_cast<std::uint32_t>(r), sampler.gamma(dist)};
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, num_cells));
  if (threads <= 1) {
    for (std::size_t c = 0; c < num_cells; ++c) fill_cell(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        for (std::size_t c = next++; c < num_cells; c = next++) fill_cell(c);
      });
    }
  }
  return cohort;
}

ReplayTally replay_tally(const Cohort& cohort, const ProcedureOutcome& outcome) {
  const std::size_t num_regions = cohort.regions.size();
  std::vector<double> thresholds(cohort.groups.size() * num_regions);
  for (std::size_t g = 0; g < cohort.groups.size(); ++g) {
    for (std::size_t r = 0; r < num_regions; ++r) {
      auto it = outcome.thresholds.find(Cell{cohort.groups[g], cohort.regions[r]});
      if (it == outcome.thresholds.end()) {
        raise(ErrorKind::kArgument, "outcome has no threshold for cell (" +
                                        cohort.groups[g] + ", " + cohort.regions[r] + ")");
      }
      thresholds[g * num_regions + r] = it->second.value();
    }
  }
  std::vector<std::size_t> admitted(thresholds.size(), 0);
  std::vector<std::size_t> size(thresholds.size(), 0);
  for (const auto& rec : cohort.records) {
    const std::size_t c = rec.group * num_regions + rec.region;
    ++size[c];
    if (rec.q <= thresholds[c]) ++admitted[c];
  }
  ReplayTally tally;
  for (std::size_t c = 0; c < thresholds.size(); ++c) {
    const Cell cell{cohort.groups[c / num_regions], cohort.regions[c % num_regions]};
    tally.admitted[cell] = admitted[c];
    tally.size[cell] = size[c];
    tally.total_admitted += admitted[c];
  }
  return tally;
}

CellMap<double> replay_procedure(const Cohort& cohort, const ProcedureOutcome& outcome) {
  const ReplayTally tally = replay_tally(cohort, outcome);
  CellMap<double> rates;
  for (const auto& [cell, n] : tally.size) {
    rates[cell] = n == 0 ? 0.0
                         : static_cast<double>(tally.admitted.at(cell)) / static_cast<double>(n);
  }
  return rates;
}

void write_cohort_csv(const Cohort& cohort, const ScoreScale& scale, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  out << "group,region,q,raw_score\n";
  char buf[64];
  for (const auto& rec : cohort.records) {
    out << cohort.groups[rec.group] << ',' << cohort.regions[rec.region] << ',';
    auto res = std::to_chars(buf, buf + sizeof buf, rec.q);
    out.write(buf, res.ptr - buf) << ',';
    res = std::to_chars(buf, buf + sizeof buf, from_log_score(LogScore(rec.q), scale));
    out.write(buf, res.ptr - buf) << '\n';
  }
  if (!out) raise(ErrorKind::kIo, "failed writing '" + path + "'");
}

}  // namespace admitsim
