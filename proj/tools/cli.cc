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

#include "cli.h"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "admitsim/errors.h"
#include "admitsim/fitter.h"
#include "admitsim/io.h"
#include "admitsim/montecarlo.h"
#include "admitsim/population.h"
#include "admitsim/procedures.h"
#include "admitsim/theorems.h"
#include "json.hpp"

namespace admitsim::cli {
namespace {

using nlohmann::json;

// A usage problem detected after CLI11 accepted the flags (e.g. --eta given
// to a procedure without a free parameter).
struct UsageError {
  std::string message;
};

struct Options {
  unsigned threads = 0;
  std::string population;
  std::string out;
  std::string in;
  std::string procedure;
  double eta = 0.0;
  double capacity = 0.0;
  int theorem = 0;
  std::uint64_t seed = 0;
  std::size_t replication = 1;
  std::string cohort_csv;
  std::string stats_groups;
  std::string stats_quantiles;
  std::size_t regions = 3;
  std::size_t restarts = 32;
  double score_min = 0.0;
  double score_max = 4.0;
};

void diagnose(std::ostream& err, const json& diag) { err << diag.dump() << "\n"; }

PopulationFile load_population(const Options& opt, const CLI::App& sub) {
  PopulationFile file = parse_population(opt.population);
  if (sub.count("--capacity") > 0) file.capacity.emplace(opt.capacity);
  return file;
}

Capacity require_capacity(const PopulationFile& file) {
  if (!file.capacity) {
    throw UsageError{"capacity missing: add capacity.g to the population file or pass --capacity"};
  }
  check_capacity(file.population, *file.capacity);
  return *file.capacity;
}

std::optional<double> eta_flag(const Options& opt, const CLI::App& sub, bool wanted,
                               const std::string& what) {
  const bool given = sub.count("--eta") > 0;
  if (wanted && !given) throw UsageError{"--eta is required for " + what};
  if (!wanted && given) throw UsageError{"--eta is not accepted for " + what};
  if (given) return opt.eta;
  return std::nullopt;
}

ProcedureSpec procedure_spec(const Options& opt, const CLI::App& sub) {
  const auto kind = parse_procedure_kind(opt.procedure);
  if (!kind) throw UsageError{"unknown procedure '" + opt.procedure + "'"};
  return {*kind, eta_flag(opt, sub, procedure_takes_eta(*kind), opt.procedure)};
}

void print_outcome(std::ostream& out, const ProcedureOutcome& o) {
  out << to_string(o.procedure) << ": capacity " << format_double(o.capacity) << ", admits "
      << format_double(o.total_admits()) << "\n";
  for (const auto& [cell, q] : o.thresholds) {
    out << "  " << cell.group << "/" << cell.region << ": threshold "
        << format_double(q.value()) << ", admit prob " << format_double(o.admit_prob.at(cell))
        << ", admits " << format_double(o.admit_count.at(cell)) << "\n";
  }
}

void print_theorem(std::ostream& out, const TheoremReport& rep) {
  out << to_string(rep.theorem) << ": " << (rep.passed() ? "holds" : "not established") << "\n";
  for (const auto& [name, ok] : rep.preconditions) {
    out << "  precondition " << name << ": " << (ok ? "met" : "not met") << "\n";
  }
  out << "  conclusion: " << (rep.conclusion_holds ? "holds" : "fails") << "\n";
  for (const auto& [name, v] : rep.witness) {
    out << "  " << name << " = " << format_double(v) << "\n";
  }
  if (!rep.note.empty()) out << "  note: " << rep.note << "\n";
}

int cmd_validate(const Options& opt, const CLI::App& sub, std::ostream& out, std::ostream& err) {
  const PopulationFile file = load_population(opt, sub);
  if (!file.capacity) {
    throw UsageError{"capacity missing: add capacity.g to the population file or pass --capacity"};
  }
  const auto violations = validate_theorem_setting(file.population, *file.capacity);
  if (violations.empty()) {
    out << "all assumptions hold\n";
    return kExitOk;
  }
  json list = json::array();
  for (const auto& v : violations) {
    out << "violated: " << v.condition << ": " << v.detail << "\n";
    list.push_back({{"condition", v.condition}, {"detail", v.detail}});
  }
  diagnose(err, {{"status", "assumptions_violated"}, {"violations", std::move(list)}});
  return kExitFailure;
}

int cmd_solve(const Options& opt, const CLI::App& sub, std::ostream& out) {
  const PopulationFile file = load_population(opt, sub);
  const ProcedureSpec spec = procedure_spec(opt, sub);
  const Capacity g = require_capacity(file);
  ReportBundle bundle;
  bundle.source = "solve";
  bundle.outcomes.push_back(solve(file.population, g, spec));
  bundle.population = file;
  print_outcome(out, bundle.outcomes.back());
  emit_report(bundle, opt.out);
  return kExitOk;
}

int cmd_check(const Options& opt, const CLI::App& sub, std::ostream& out, std::ostream& err) {
  const PopulationFile file = load_population(opt, sub);
  const auto id = static_cast<TheoremId>(opt.theorem);
  const auto eta = eta_flag(opt, sub, id != TheoremId::kTopPercentage,
                            "theorem " + std::to_string(opt.theorem));
  const Capacity g = require_capacity(file);
  const Population& pop = file.population;

  ReportBundle bundle;
  bundle.source = "check";
  bundle.population = file;
  switch (id) {
    case TheoremId::kQuota:
      bundle.theorems.push_back(check_theorem1(pop, g, *eta));
      bundle.outcomes.push_back(solve_quota(pop, g, *eta));
      break;
    case TheoremId::kPlusFactor:
      bundle.theorems.push_back(check_theorem2(pop, g, *eta));
      bundle.outcomes.push_back(solve_default(pop, g));
      bundle.outcomes.push_back(solve_plus_factor(pop, g, *eta));
      break;
    case TheoremId::kTopPercentage:
      bundle.theorems.push_back(check_theorem3(pop, g));
      bundle.outcomes.push_back(solve_top_percentage(pop, g));
      break;
  }
  const TheoremReport& rep = bundle.theorems.back();
  print_theorem(out, rep);
  emit_report(bundle, opt.out);
  if (rep.passed()) return kExitOk;

  json pre = json::object();
  for (const auto& [name, ok] : rep.preconditions) pre[name] = ok;
  diagnose(err, {{"status", rep.covered() ? "conclusion_failed" : "preconditions_not_met"},
                 {"theorem", std::string(to_string(rep.theorem))},
                 {"preconditions", std::move(pre)},
                 {"conclusion_holds", rep.conclusion_holds},
                 {"note", rep.note}});
  return kExitFailure;
}

int cmd_simulate(const Options& opt, const CLI::App& sub, std::ostream& out) {
  const PopulationFile file = load_population(opt, sub);
  const ProcedureSpec spec = procedure_spec(opt, sub);
  const Capacity g = require_capacity(file);
  if (opt.replication == 0) throw UsageError{"--replication must be at least 1"};

  const ProcedureOutcome outcome = solve(file.population, g, spec);
  const Cohort cohort = sample_cohort(file.population, opt.seed, opt.replication, opt.threads);
  if (!opt.cohort_csv.empty()) write_cohort_csv(cohort, file.population.scale(), opt.cohort_csv);
  const ReplayTally tally = replay_tally(cohort, outcome);

  EmpiricalRates emp;
  emp.seed = opt.seed;
  emp.replication = opt.replication;
  emp.admitted = tally.admitted;
  emp.size = tally.size;
  for (const auto& [cell, m] : tally.size) {
    emp.rate[cell] = m == 0 ? 0.0 : static_cast<double>(tally.admitted.at(cell)) / m;
  }

  print_outcome(out, outcome);
  for (const auto& [cell, rate] : emp.rate) {
    out << "  empirical " << cell.group << "/" << cell.region << ": " << format_double(rate)
        << " (" << emp.admitted.at(cell) << "/" << emp.size.at(cell) << ")\n";
  }
  ReportBundle bundle;
  bundle.source = "simulate";
  bundle.population = file;
  bundle.outcomes.push_back(outcome);
  bundle.empirical = std::move(emp);
  emit_report(bundle, opt.out);
  return kExitOk;
}

int cmd_fit(const Options& opt, std::ostream& out) {
  FitProblem problem;
  problem.stats = parse_summary_stats(opt.stats_groups, opt.stats_quantiles,
                                      ScoreScale(opt.score_min, opt.score_max));
  if (opt.regions == 0) throw UsageError{"--regions must be at least 1"};
  if (opt.restarts == 0) throw UsageError{"--restarts must be at least 1"};
  problem.num_regions = opt.regions;
  problem.restarts = opt.restarts;
  problem.rng_seed = opt.seed;
  problem.threads = opt.threads;
  const FitSolution sol = fit(problem);

  out << "loss " << format_double(sol.loss) << (sol.converged ? " (converged)" : "")
      << ", best restart " << sol.best_restart << ", evaluations " << sol.evaluations << "\n";
  for (std::size_t r = 0; r < sol.regions.size(); ++r) {
    out << "  region " << sol.regions[r] << ": k " << format_double(sol.region_dists[r].shape())
        << ", theta " << format_double(sol.region_dists[r].scale()) << ", threshold "
        << format_double(sol.thresholds[r]) << "\n";
  }
  for (std::size_t g = 0; g < sol.groups.size(); ++g) {
    out << "  group " << sol.groups[g] << ": admit rate "
        << format_double(sol.group_admit_rate(g)) << "\n";
  }

  ReportBundle bundle;
  bundle.source = "fit";
  PopulationFile fitted{sol.population(), std::nullopt};
  const double admits = problem.stats.total_admits();
  if (admits > 0.0) fitted.capacity.emplace(admits);
  bundle.population = std::move(fitted);
  bundle.fit = sol;
  emit_report(bundle, opt.out);
  return kExitOk;
}

int cmd_report(const Options& opt, std::ostream& out) {
  ReportBundle bundle = parse_report(opt.in);
  std::optional<Population> pop;
  if (bundle.population) {
    pop = bundle.population->population;
  } else if (bundle.fit) {
    pop = bundle.fit->population();
  } else {
    raise(ErrorKind::kValidation, opt.in + ": report carries no population to plot");
  }
  bundle.density = make_density_grid(*pop);
  bundle.source = "report";
  const auto& d = *bundle.density;
  for (std::size_t r = 0; r < d.regions.size(); ++r) {
    out << "region " << d.regions[r] << ": density mass "
        << format_double(trapezoid(d.q, d.region_density[r])) << "\n";
  }
  out << "overall: density mass " << format_double(trapezoid(d.q, d.overall)) << "\n";
  emit_report(bundle, opt.out);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options opt;
  opt.threads = std::max(1u, std::thread::hardware_concurrency());

  CLI::App app{"Admissions threshold models over region-specific Gamma score distributions",
               "admitsim"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.add_option("--threads", opt.threads, "Worker threads for sampling and fitting")
      ->check(CLI::PositiveNumber);

  auto add_population = [&](CLI::App* sub) {
    sub->add_option("--population", opt.population, "Population JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--capacity", opt.capacity, "Seats g (overrides capacity.g in the file)");
  };
  const std::vector<std::string> procedures = {"default", "quota", "plus-factor",
                                               "top-percentage"};
  auto add_procedure = [&](CLI::App* sub) {
    sub->add_option("--procedure", opt.procedure, "Admission procedure")
        ->required()
        ->check(CLI::IsMember(procedures));
    sub->add_option("--eta", opt.eta, "eta_quota (quota) or eta_dagger (plus-factor)");
  };

  CLI::App* validate = app.add_subcommand("validate", "Check the modelling assumptions");
  add_population(validate);

  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve admission thresholds");
  add_population(solve_cmd);
  add_procedure(solve_cmd);
  solve_cmd->add_option("--out", opt.out, "Report JSON to write")->required();

  CLI::App* check = app.add_subcommand("check", "Verify a fairness theorem on an instance");
  add_population(check);
  check->add_option("--theorem", opt.theorem, "Theorem number")
      ->required()
      ->check(CLI::Range(1, 3));
  check->add_option("--eta", opt.eta, "eta_quota (theorem 1) or eta_dagger (theorem 2)");
  check->add_option("--out", opt.out, "Report JSON to write")->required();

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo replay of a procedure");
  add_population(simulate);
  add_procedure(simulate);
  simulate->add_option("--seed", opt.seed, "RNG seed")->required();
  simulate->add_option("--replication", opt.replication, "Individuals per unit of count")
      ->required();
  simulate->add_option("--cohort-csv", opt.cohort_csv, "Also write the sampled cohort here");
  simulate->add_option("--out", opt.out, "Report JSON to write")->required();

  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit regions to summary statistics");
  fit_cmd->add_option("--stats-groups", opt.stats_groups, "CSV: group,applicants,admits")
      ->required()
      ->check(CLI::ExistingFile);
  fit_cmd
      ->add_option("--stats-quantiles", opt.stats_quantiles,
                   "CSV: gpa_cut,applicant_frac_at_or_above,admit_frac_at_or_above")
      ->required()
      ->check(CLI::ExistingFile);
  fit_cmd->add_option("--regions", opt.regions, "Number of latent regions");
  fit_cmd->add_option("--restarts", opt.restarts, "Nelder-Mead restarts");
  fit_cmd->add_option("--seed", opt.seed, "RNG seed");
  fit_cmd->add_option("--score-min", opt.score_min, "Raw score lower bound");
  fit_cmd->add_option("--score-max", opt.score_max, "Raw score upper bound");
  fit_cmd->add_option("--out", opt.out, "Report JSON to write")->required();

  CLI::App* report = app.add_subcommand("report", "Add plot-ready density grids to a report");
  report->add_option("--in", opt.in, "Report JSON to read")->required()->check(CLI::ExistingFile);
  report->add_option("--out", opt.out, "Report JSON to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate(opt, *validate, out, err);
    if (solve_cmd->parsed()) return cmd_solve(opt, *solve_cmd, out);
    if (check->parsed()) return cmd_check(opt, *check, out, err);
    if (simulate->parsed()) return cmd_simulate(opt, *simulate, out);
    if (fit_cmd->parsed()) return cmd_fit(opt, out);
    if (report->parsed()) return cmd_report(opt, out);
  } catch (const UsageError& e) {
    diagnose(err, {{"status", "usage"}, {"message", e.message}});
    return kExitUsage;
  } catch (const Error& e) {
    diagnose(err, {{"status", "error"},
                   {"kind", std::string(to_string(e.kind()))},
                   {"message", e.what()}});
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace admitsim::cli
