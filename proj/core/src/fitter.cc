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

#include "admitsim/fitter.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <span>
#include <sstream>
#include <thread>

#include "admitsim/errors.h"
#include "admitsim/montecarlo.h"

namespace admitsim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Precomputed observation side of the objective.
class Evaluator {
 public:
  Evaluator(const SummaryStats& stats, const FamilyWeights& weights)
      : stats_(stats), weights_(weights), qstar_(convert_quantile_points(stats)) {
    total_ = stats.total_applicants();
    for (const auto& qp : stats.quantiles) {
      obs_app_q_.push_back(qp.applicant_frac * total_);
      obs_adm_q_.push_back(qp.admit_frac * total_);
    }
  }

  // With `residuals` null only the loss is computed.
  double evaluate(const FitParameters& p, std::map<std::string, double>* residuals) const {
    const std::size_t num_groups = stats_.groups.size();
    const std::size_t num_regions = p.region_dists.size();
    std::vector<double> region_n(num_regions, 0.0);
    std::vector<double> region_rate(num_regions, 0.0);
    for (std::size_t r = 0; r < num_regions; ++r) {
      for (std::size_t g = 0; g < num_groups; ++g) region_n[r] += p.counts[g * num_regions + r];
      region_rate[r] = gamma_cdf(p.region_dists[r], LogScore(p.thresholds[r]));
    }

    double loss = 0.0;
    auto family = [&](double weight, std::size_t terms, const char* name, auto&& term) {
      if (terms == 0) return;
      double sum = 0.0;
      for (std::size_t i = 0; i < terms; ++i) {
        const auto [model, observed, label] = term(i);
        const double denom = observed > 0.0 ? observed : total_;
        const double rel = (model - observed) / denom;
        sum += rel * rel;
        if (residuals) (*residuals)[std::string(name) + "/" + label] = rel;
      }
      loss += weight / static_cast<double>(terms) * sum;
    };

    family(weights_.applicants, num_groups, "applicants", [&](std::size_t g) {
      double model = 0.0;
      for (std::size_t r = 0; r < num_regions; ++r) model += p.counts[g * num_regions + r];
      return std::tuple(model, stats_.applicants[g], stats_.groups[g]);
    });
    family(weights_.admits, num_groups, "admits", [&](std::size_t g) {
      double model = 0.0;
      for (std::size_t r = 0; r < num_regions; ++r) {
        model += p.counts[g * num_regions + r] * region_rate[r];
      }
      return std::tuple(model, stats_.admits[g], stats_.groups[g]);
    });
    family(weights_.applicant_quantiles, qstar_.size(), "applicant_quantile",
           [&](std::size_t i) {
             double model = 0.0;
             for (std::size_t r = 0; r < num_regions; ++r) {
               model += gamma_cdf(p.region_dists[r], qstar_[i]) * region_n[r];
             }
             return std::tuple(model, obs_app_q_[i], shortest(stats_.quantiles[i].raw_score));
           });
    family(weights_.admit_quantiles, qstar_.size(), "admit_quantile", [&](std::size_t i) {
      double model = 0.0;
      for (std::size_t r = 0; r < num_regions; ++r) {
        const double q = std::min(qstar_[i].value(), p.thresholds[r]);
        model += gamma_cdf(p.region_dists[r], LogScore(q)) * region_n[r];
      }
      return std::tuple(model, obs_adm_q_[i], shortest(stats_.quantiles[i].raw_score));
    });
    return loss;
  }

 private:
  const SummaryStats& stats_;
  FamilyWeights weights_;
  std::vector<LogScore> qstar_;
  std::vector<double> obs_app_q_;
  std::vector<double> obs_adm_q_;
  double total_ = 0.0;
};

// Unconstrained coordinates: per region (log k, log theta, log q), then per
// group R-1 softmax logits (the last region's logit is pinned to 0).
class Transform {
 public:
  Transform(std::size_t num_groups, std::size_t num_regions, std::vector<double> group_totals)
      : num_groups_(num_groups), num_regions_(num_regions), totals_(std::move(group_totals)) {}

  std::size_t dimension() const { return 3 * num_regions_ + num_groups_ * (num_regions_ - 1); }

  FitParameters decode(std::span<const double> x) const {
    FitParameters p;
    for (std::size_t r = 0; r < num_regions_; ++r) {
      const double k = std::exp(std::clamp(x[3 * r], kLogShapeMin, kLogShapeMax));
      const double theta = std::exp(std::clamp(x[3 * r + 1], kLogMin, kLogMax));
      p.region_dists.emplace_back(k, theta);
      p.thresholds.push_back(std::exp(std::clamp(x[3 * r + 2], kLogMin, kLogMax)));
    }
    p.counts.assign(num_groups_ * num_regions_, 0.0);
    std::vector<double> logits(num_regions_);
    for (std::size_t g = 0; g < num_groups_; ++g) {
      for (std::size_t r = 0; r + 1 < num_regions_; ++r) {
        logits[r] = std::clamp(x[3 * num_regions_ + g * (num_regions_ - 1) + r], -50.0, 50.0);
      }
      logits[num_regions_ - 1] = 0.0;
      const double top = *std::max_element(logits.begin(), logits.end());
      double z = 0.0;
      for (double& l : logits) {
        l = std::exp(l - top);
        z += l;
      }
      for (std::size_t r = 0; r < num_regions_; ++r) {
        p.counts[g * num_regions_ + r] = totals_[g] * logits[r] / z;
      }
    }
    return p;
  }

 private:
  static constexpr double kLogShapeMin = -3.0;  // k ~ 0.05
  static constexpr double kLogShapeMax = 6.2;   // k ~ 500
  static constexpr double kLogMin = -25.0;
  static constexpr double kLogMax = 5.0;

  std::size_t num_groups_;
  std::size_t num_regions_;
  std::vector<double> totals_;
};

struct SearchResult {
  std::vector<double> x;
  double f = kInf;
  std::size_t evaluations = 0;
  bool converged = false;
};

// Nelder-Mead with dimension-adapted coefficients. On stagnation the
// simplex is rebuilt around the incumbent; a stagnation right after a
// rebuild ends the search as converged.
SearchResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                         std::vector<double> x0, const std::vector<double>& steps,
                         const FitProblem& cfg) {
  const std::size_t n = x0.size();
  const double dn = static_cast<double>(n);
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / dn;
  const double gamma = 0.75 - 1.0 / (2.0 * dn);
  const double delta = 1.0 - 1.0 / dn;

  SearchResult result;
  auto eval = [&](std::span<const double> x) {
    ++result.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
  };

  std::vector<std::vector<double>> simplex(n + 1);
  std::vector<double> values(n + 1);
  auto build = [&](const std::vector<double>& center, double center_value) {
    simplex[0] = center;
    values[0] = center_value;
    for (std::size_t i = 0; i < n; ++i) {
      simplex[i + 1] = center;
      simplex[i + 1][i] += steps[i];
      values[i + 1] = eval(simplex[i + 1]);
    }
  };
  build(x0, eval(x0));

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  double best = kInf;
  std::size_t since_improvement = 0;
  bool just_rebuilt = false;

  while (result.evaluations < cfg.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t ib = order[0];
    const std::size_t iw = order[n];
    const std::size_t is = order[n - 1];

    if (values[ib] < best * (1.0 - cfg.stagnation_tolerance) || values[ib] == 0.0) {
      if (values[ib] < best) just_rebuilt = false;
      best = values[ib];
      since_improvement = 0;
    } else if (++since_improvement >= cfg.stagnation_iterations) {
      if (just_rebuilt) {
        result.converged = true;
        break;
      }
      const std::vector<double> center = simplex[ib];
      build(center, values[ib]);
      just_rebuilt = true;
      since_improvement = 0;
      continue;
    }
    if (best == 0.0) {
      result.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[order[k]][j];
    }
    for (double& c : centroid) c /= dn;

    for (std::size_t j = 0; j < n; ++j) xr[j] = centroid[j] + alpha * (centroid[j] - simplex[iw][j]);
    const double fr = eval(xr);
    if (fr < values[ib]) {
      for (std::size_t j = 0; j < n; ++j) xe[j] = centroid[j] + beta * (xr[j] - centroid[j]);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[iw] = xe;
        values[iw] = fe;
      } else {
        simplex[iw] = xr;
        values[iw] = fr;
      }
      continue;
    }
    if (fr < values[is]) {
      simplex[iw] = xr;
      values[iw] = fr;
      continue;
    }
    bool accepted = false;
    if (fr < values[iw]) {
      for (std::size_t j = 0; j < n; ++j) xc[j] = centroid[j] + gamma * (xr[j] - centroid[j]);
      const double fc = eval(xc);
      if (fc <= fr) {
        simplex[iw] = xc;
        values[iw] = fc;
        accepted = true;
      }
    } else {
      for (std::size_t j = 0; j < n; ++j) xc[j] = centroid[j] + gamma * (simplex[iw][j] - centroid[j]);
      const double fc = eval(xc);
      if (fc < values[iw]) {
        simplex[iw] = xc;
        values[iw] = fc;
        accepted = true;
      }
    }
    if (!accepted) {
      for (std::size_t k = 1; k <= n; ++k) {
        auto& v = simplex[order[k]];
        for (std::size_t j = 0; j < n; ++j) v[j] = simplex[ib][j] + delta * (v[j] - simplex[ib][j]);
        values[order[k]] = eval(v);
      }
    }
  }

  const auto best_it = std::min_element(values.begin(), values.end());
  result.x = simplex[static_cast<std::size_t>(best_it - values.begin())];
  result.f = *best_it;
  return result;
}

double median_positive_qstar(const std::vector<LogScore>& qstar) {
  std::vector<double> v;
  for (const auto& q : qstar) {
    if (q.value() > 0.0) v.push_back(q.value());
  }
  if (v.empty()) return 0.2;
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

double SummaryStats::total_applicants() const {
  return std::accumulate(applicants.begin(), applicants.end(), 0.0);
}

double SummaryStats::total_admits() const {
  return std::accumulate(admits.begin(), admits.end(), 0.0);
}

void validate_summary_stats(const SummaryStats& stats) {
  if (stats.groups.empty()) raise(ErrorKind::kValidation, "summary stats list no groups");
  if (stats.applicants.size() != stats.groups.size() ||
      stats.admits.size() != stats.groups.size()) {
    raise(ErrorKind::kValidation, "summary stats: group columns have different lengths");
  }
  std::set<std::string> seen;
  for (std::size_t g = 0; g < stats.groups.size(); ++g) {
    const auto& name = stats.groups[g];
    if (name.empty() || !seen.insert(name).second) {
      raise(ErrorKind::kValidation, "summary stats: empty or duplicate group '" + name + "'");
    }
    const double apps = stats.applicants[g];
    const double adms = stats.admits[g];
    if (!(apps >= 0.0) || !std::isfinite(apps) || !(adms >= 0.0) || !std::isfinite(adms)) {
      raise(ErrorKind::kValidation, "summary stats: counts for '" + name +
                                        "' must be finite and >= 0");
    }
    if (adms > apps) {
      raise(ErrorKind::kValidation,
            "summary stats: admits exceed applicants for group '" + name + "'");
    }
  }
  if (!(stats.total_applicants() > 0.0)) {
    raise(ErrorKind::kValidation, "summary stats: no applicants");
  }
  std::set<double> cuts;
  for (const auto& qp : stats.quantiles) {
    if (!(qp.raw_score > stats.scale.s_min()) || !(qp.raw_score <= stats.scale.s_max())) {
      std::ostringstream msg;
      msg << "quantile cut " << qp.raw_score << " outside (" << stats.scale.s_min() << ", "
          << stats.scale.s_max() << "]";
      raise(ErrorKind::kDomain, msg.str());
    }
    if (!cuts.insert(qp.raw_score).second) {
      raise(ErrorKind::kValidation, "duplicate quantile cut " + shortest(qp.raw_score));
    }
    for (double frac : {qp.applicant_frac, qp.admit_frac}) {
      if (!(frac >= 0.0 && frac <= 1.0)) {
        raise(ErrorKind::kValidation,
              "quantile fractions must lie in [0, 1] at cut " + shortest(qp.raw_score));
      }
    }
    if (qp.admit_frac > qp.applicant_frac) {
      raise(ErrorKind::kValidation,
            "admit fraction exceeds applicant fraction at cut " + shortest(qp.raw_score));
    }
  }
  // Shares at or above a cut grow as the cut decreases.
  std::vector<QuantilePoint> sorted = stats.quantiles;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.raw_score > b.raw_score; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].applicant_frac < sorted[i - 1].applicant_frac ||
        sorted[i].admit_frac < sorted[i - 1].admit_frac) {
      raise(ErrorKind::kValidation, "quantile fractions decrease below cut " +
                                        shortest(sorted[i - 1].raw_score));
    }
  }
}

std::vector<LogScore> convert_quantile_points(const SummaryStats& stats) {
  std::vector<LogScore> out;
  out.reserve(stats.quantiles.size());
  for (const auto& qp : stats.quantiles) out.push_back(to_log_score(qp.raw_score, stats.scale));
  return out;
}

ObjectiveValue objective(const SummaryStats& stats, const FitParameters& candidate,
                         const FamilyWeights& weights) {
  const std::size_t num_regions = candidate.region_dists.size();
  if (num_regions == 0 || candidate.thresholds.size() != num_regions ||
      candidate.counts.size() != stats.groups.size() * num_regions) {
    raise(ErrorKind::kArgument, "objective: candidate dimensions do not match the stats");
  }
  for (double q : candidate.thresholds) {
    if (!(q > 0.0)) raise(ErrorKind::kDomain, "objective: thresholds must be positive");
  }
  for (double n : candidate.counts) {
    if (!(n >= 0.0)) raise(ErrorKind::kDomain, "objective: counts must be >= 0");
  }
  Evaluator evaluator(stats, weights);
  ObjectiveValue out;
  out.loss = evaluator.evaluate(candidate, &out.residuals);
  return out;
}

double FitSolution::group_admit_rate(std::size_t group) const {
  double admitted = 0.0;
  double applied = 0.0;
  for (std::size_t r = 0; r < regions.size(); ++r) {
    const double n = count(group, r);
    applied += n;
    admitted += n * gamma_cdf(region_dists[r], LogScore(thresholds[r]));
  }
  return applied > 0.0 ? admitted / applied : 0.0;
}

FitParameters FitSolution::parameters() const {
  return FitParameters{region_dists, thresholds, counts};
}

Population FitSolution::population() const {
  return Population(DemographicTable(groups, regions, counts), region_dists, scale);
}

FitSolution fit(const FitProblem& problem) {
  const SummaryStats& stats = problem.stats;
  validate_summary_stats(stats);
  if (problem.num_regions < 1) raise(ErrorKind::kArgument, "fit needs at least one region");
  if (problem.restarts < 1) raise(ErrorKind::kArgument, "fit needs at least one restart");

  const std::size_t num_groups = stats.groups.size();
  const std::size_t num_regions = problem.num_regions;
  const Evaluator evaluator(stats, problem.weights);
  const Transform transform(num_groups, num_regions, stats.applicants);
  const std::size_t dim = transform.dimension();
  const double q_mid = median_positive_qstar(convert_quantile_points(stats));

  std::vector<double> steps(dim, 0.5);
  for (std::size_t r = 0; r < num_regions; ++r) {
    steps[3 * r] = 0.4;
    steps[3 * r + 1] = 0.4;
    steps[3 * r + 2] = 0.3;
  }

  auto loss = [&](std::span<const double> x) {
    return evaluator.evaluate(transform.decode(x), nullptr);
  };

  auto run_restart = [&](std::size_t index) {
    GammaSampler rng(cell_seed(problem.rng_seed, index));
    std::vector<double> x0(dim);
    for (std::size_t r = 0; r < num_regions; ++r) {
      const double log_k = std::log(1.0) + rng.uniform() * std::log(20.0);
      const double log_mean = std::log(q_mid) + (2.0 * rng.uniform() - 1.0) * std::log(3.0);
      x0[3 * r] = log_k;
      x0[3 * r + 1] = log_mean - log_k;
      x0[3 * r + 2] = std::log(q_mid) + (2.0 * rng.uniform() - 1.0) * std::log(3.0);
    }
    for (std::size_t i = 3 * num_regions; i < dim; ++i) x0[i] = 2.0 * rng.uniform() - 1.0;
    return nelder_mead(loss, std::move(x0), steps, problem);
  };

  std::vector<SearchResult> results(problem.restarts);
  unsigned threads = problem.threads == 0
                         ? std::max(1u, std::thread::hardware_concurrency())
                         : problem.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, problem.restarts));
  if (threads <= 1) {
    for (std::size_t i = 0; i < problem.restarts; ++i) results[i] = run_restart(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < problem.restarts; i = next++) results[i] = run_restart(i);
      });
    }
  }

  std::size_t best = 0;
  std::size_t evaluations = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    evaluations += results[i].evaluations;
    if (results[i].f < results[best].f) best = i;
  }

  const FitParameters raw = transform.decode(results[best].x);
  std::vector<std::size_t> perm(num_regions);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    const auto& da = raw.region_dists[a];
    const auto& db = raw.region_dists[b];
    if (da.mean() != db.mean()) return da.mean() < db.mean();
    return da.shape() < db.shape();
  });

  FitSolution sol;
  sol.groups = stats.groups;
  sol.scale = stats.scale;
  sol.counts.assign(num_groups * num_regions, 0.0);
  for (std::size_t r = 0; r < num_regions; ++r) {
    sol.regions.push_back(std::to_string(r));
    sol.region_dists.push_back(raw.region_dists[perm[r]]);
    sol.thresholds.push_back(raw.thresholds[perm[r]]);
    for (std::size_t g = 0; g < num_groups; ++g) {
      sol.counts[g * num_regions + r] = raw.counts[g * num_regions + perm[r]];
    }
  }
  sol.loss = evaluator.evaluate(sol.parameters(), &sol.residuals);
  sol.converged = results[best].converged;
  sol.evaluations = evaluations;
  sol.best_restart = best;
  return sol;
}

}  // namespace admitsim
