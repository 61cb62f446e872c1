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

#include "admitsim/io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "admitsim/errors.h"
#include "json.hpp"

namespace admitsim {
namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// JSON helpers

json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

[[noreturn]] void parse_fail(std::string_view source, const std::string& field,
                             const std::string& what) {
  raise(ErrorKind::kParse, std::string(source) + ": " + field + ": " + what);
}

class Reader {
 public:
  explicit Reader(std::string_view source) : source_(source) {}

  const json& field(const json& obj, const std::string& path, const char* key) const {
    if (!obj.is_object()) parse_fail(source_, path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) parse_fail(source_, path + "." + key, "missing field");
    return *it;
  }

  bool has(const json& obj, const char* key) const {
    return obj.is_object() && obj.contains(key);
  }

  double number(const json& v, const std::string& path) const {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      const auto& s = v.get_ref<const std::string&>();
      if (s == "inf") return std::numeric_limits<double>::infinity();
      if (s == "-inf") return -std::numeric_limits<double>::infinity();
      if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    parse_fail(source_, path, "expected a number");
  }
  double number(const json& obj, const std::string& path, const char* key) const {
    return number(field(obj, path, key), path + "." + key);
  }

  std::string string(const json& obj, const std::string& path, const char* key) const {
    const json& v = field(obj, path, key);
    if (!v.is_string()) parse_fail(source_, path + "." + key, "expected a string");
    return v.get<std::string>();
  }

  bool boolean(const json& obj, const std::string& path, const char* key) const {
    const json& v = field(obj, path, key);
    if (!v.is_boolean()) parse_fail(source_, path + "." + key, "expected a boolean");
    return v.get<bool>();
  }

  std::uint64_t unsigned_int(const json& obj, const std::string& path, const char* key) const {
    const json& v = field(obj, path, key);
    if (!v.is_number_unsigned()) {
      parse_fail(source_, path + "." + key, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  const json& array(const json& obj, const std::string& path, const char* key) const {
    const json& v = field(obj, path, key);
    if (!v.is_array()) parse_fail(source_, path + "." + key, "expected an array");
    return v;
  }

  std::vector<double> numbers(const json& obj, const std::string& path, const char* key) const {
    const json& arr = array(obj, path, key);
    std::vector<double> out;
    out.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
      out.push_back(number(arr[i], path + "." + key + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

  std::map<std::string, double> number_map(const json& obj, const std::string& path,
                                           const char* key) const {
    const json& v = field(obj, path, key);
    if (!v.is_object()) parse_fail(source_, path + "." + key, "expected an object");
    std::map<std::string, double> out;
    for (const auto& [name, value] : v.items()) {
      out[name] = number(value, path + "." + key + "." + name);
    }
    return out;
  }

  void check_version(const json& doc) const {
    const json& v = field(doc, "$", "version");
    if (!v.is_number_integer() || v.get<int>() != kFormatVersion) {
      parse_fail(source_, "$.version",
                 "unsupported format version (expected " + std::to_string(kFormatVersion) + ")");
    }
  }

  std::string_view source() const { return source_; }

 private:
  std::string_view source_;
};

json parse_json_document(std::string_view text, std::string_view source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    raise(ErrorKind::kParse, std::string(source) + ": malformed JSON: " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Population

json population_json(const PopulationFile& file) {
  const Population& pop = file.population;
  json doc;
  doc["version"] = kFormatVersion;
  doc["scale"] = {{"s_min", num(pop.scale().s_min())}, {"s_max", num(pop.scale().s_max())}};
  if (file.capacity) doc["capacity"] = {{"g", num(file.capacity->value())}};
  json regions = json::array();
  for (std::size_t r = 0; r < pop.table().regions().size(); ++r) {
    regions.push_back({{"id", pop.table().regions()[r]},
                       {"shape", num(pop.dist(r).shape())},
                       {"scale_param", num(pop.dist(r).scale())}});
  }
  doc["regions"] = std::move(regions);
  json counts = json::array();
  for (const auto& e : pop.table().entries()) {
    counts.push_back({{"group", e.group}, {"region", e.region}, {"n", num(e.count)}});
  }
  doc["counts"] = std::move(counts);
  return doc;
}

PopulationFile population_from_json(const json& doc, const Reader& rd, const std::string& path) {
  const json& scale_obj = rd.field(doc, path, "scale");
  const ScoreScale scale(rd.number(scale_obj, path + ".scale", "s_min"),
                         rd.number(scale_obj, path + ".scale", "s_max"));

  std::optional<Capacity> capacity;
  if (rd.has(doc, "capacity")) {
    capacity.emplace(rd.number(rd.field(doc, path, "capacity"), path + ".capacity", "g"));
  }

  std::map<std::string, GammaParams> dists;
  const json& regions = rd.array(doc, path, "regions");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const std::string at = path + ".regions[" + std::to_string(i) + "]";
    std::string id = rd.string(regions[i], at, "id");
    if (dists.count(id)) parse_fail(rd.source(), at + ".id", "duplicate region id '" + id + "'");
    dists.emplace(id, GammaParams(rd.number(regions[i], at, "shape"),
                                  rd.number(regions[i], at, "scale_param")));
  }

  std::vector<DemographicTable::Entry> entries;
  const json& counts = rd.array(doc, path, "counts");
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const std::string at = path + ".counts[" + std::to_string(i) + "]";
    entries.push_back({rd.string(counts[i], at, "group"), rd.string(counts[i], at, "region"),
                       rd.number(counts[i], at, "n")});
  }
  DemographicTable table = DemographicTable::from_entries(entries);
  return PopulationFile{Population(std::move(table), dists, scale), capacity};
}

// ---------------------------------------------------------------------------
// Report pieces

json outcome_json(const ProcedureOutcome& out) {
  json j;
  j["procedure"] = std::string(to_string(out.procedure));
  j["capacity"] = num(out.capacity);
  if (out.eta) j["eta"] = num(*out.eta);
  if (out.q_default) j["q_default"] = num(*out.q_default);
  if (out.q_dagger) j["q_dagger"] = num(*out.q_dagger);
  if (out.eta_quota_prime) j["eta_quota_prime"] = num(*out.eta_quota_prime);
  if (!out.region_thresholds.empty()) {
    json rt = json::object();
    for (const auto& [region, q] : out.region_thresholds) rt[region] = num(q);
    j["region_thresholds"] = std::move(rt);
  }
  json cells = json::array();
  for (const auto& [cell, q] : out.thresholds) {
    cells.push_back({{"group", cell.group},
                     {"region", cell.region},
                     {"threshold", num(q.value())},
                     {"admit_prob", num(out.admit_prob.at(cell))},
                     {"admit_count", num(out.admit_count.at(cell))}});
  }
  j["cells"] = std::move(cells);
  j["total_admits"] = num(out.total_admits());
  return j;
}

ProcedureOutcome outcome_from_json(const json& j, const Reader& rd, const std::string& path) {
  ProcedureOutcome out;
  const std::string name = rd.string(j, path, "procedure");
  auto kind = parse_procedure_kind(name);
  if (!kind) parse_fail(rd.source(), path + ".procedure", "unknown procedure '" + name + "'");
  out.procedure = *kind;
  out.capacity = rd.number(j, path, "capacity");
  if (rd.has(j, "eta")) out.eta = rd.number(j, path, "eta");
  if (rd.has(j, "q_default")) out.q_default = rd.number(j, path, "q_default");
  if (rd.has(j, "q_dagger")) out.q_dagger = rd.number(j, path, "q_dagger");
  if (rd.has(j, "eta_quota_prime")) out.eta_quota_prime = rd.number(j, path, "eta_quota_prime");
  if (rd.has(j, "region_thresholds")) {
    out.region_thresholds = rd.number_map(j, path, "region_thresholds");
  }
  const json& cells = rd.array(j, path, "cells");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string at = path + ".cells[" + std::to_string(i) + "]";
    Cell cell{rd.string(cells[i], at, "group"), rd.string(cells[i], at, "region")};
    out.thresholds.insert_or_assign(cell, LogScore(rd.number(cells[i], at, "threshold")));
    out.admit_prob[cell] = rd.number(cells[i], at, "admit_prob");
    out.admit_count[cell] = rd.number(cells[i], at, "admit_count");
  }
  return out;
}

json theorem_json(const TheoremReport& rep) {
  json j;
  j["theorem"] = std::string(to_string(rep.theorem));
  j["preconditions"] = rep.preconditions;
  j["conclusion_holds"] = rep.conclusion_holds;
  j["covered_by_theorem"] = rep.covered();
  json w = json::object();
  for (const auto& [name, v] : rep.witness) w[name] = num(v);
  j["witness"] = std::move(w);
  j["note"] = rep.note;
  return j;
}

TheoremReport theorem_from_json(const json& j, const Reader& rd, const std::string& path) {
  TheoremReport rep;
  const std::string id = rd.string(j, path, "theorem");
  if (id == "T1") {
    rep.theorem = TheoremId::kQuota;
  } else if (id == "T2") {
    rep.theorem = TheoremId::kPlusFactor;
  } else if (id == "T3") {
    rep.theorem = TheoremId::kTopPercentage;
  } else {
    parse_fail(rd.source(), path + ".theorem", "unknown theorem '" + id + "'");
  }
  const json& pre = rd.field(j, path, "preconditions");
  if (!pre.is_object()) parse_fail(rd.source(), path + ".preconditions", "expected an object");
  for (const auto& [name, v] : pre.items()) {
    if (!v.is_boolean()) {
      parse_fail(rd.source(), path + ".preconditions." + name, "expected a boolean");
    }
    rep.preconditions[name] = v.get<bool>();
  }
  rep.conclusion_holds = rd.boolean(j, path, "conclusion_holds");
  rep.witness = rd.number_map(j, path, "witness");
  rep.note = rd.string(j, path, "note");
  return rep;
}

json empirical_json(const EmpiricalRates& e) {
  json j;
  j["seed"] = e.seed;
  j["replication"] = e.replication;
  json cells = json::array();
  for (const auto& [cell, rate] : e.rate) {
    cells.push_back({{"group", cell.group},
                     {"region", cell.region},
                     {"rate", num(rate)},
                     {"admitted", e.admitted.at(cell)},
                     {"size", e.size.at(cell)}});
  }
  j["cells"] = std::move(cells);
  return j;
}

EmpiricalRates empirical_from_json(const json& j, const Reader& rd, const std::string& path) {
  EmpiricalRates e;
  e.seed = rd.unsigned_int(j, path, "seed");
  e.replication = rd.unsigned_int(j, path, "replication");
  const json& cells = rd.array(j, path, "cells");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string at = path + ".cells[" + std::to_string(i) + "]";
    Cell cell{rd.string(cells[i], at, "group"), rd.string(cells[i], at, "region")};
    e.rate[cell] = rd.number(cells[i], at, "rate");
    e.admitted[cell] = rd.unsigned_int(cells[i], at, "admitted");
    e.size[cell] = rd.unsigned_int(cells[i], at, "size");
  }
  return e;
}

json fit_json(const FitSolution& sol) {
  json j;
  j["groups"] = sol.groups;
  j["scale"] = {{"s_min", num(sol.scale.s_min())}, {"s_max", num(sol.scale.s_max())}};
  json regions = json::array();
  for (std::size_t r = 0; r < sol.regions.size(); ++r) {
    regions.push_back({{"id", sol.regions[r]},
                       {"shape", num(sol.region_dists[r].shape())},
                       {"scale_param", num(sol.region_dists[r].scale())},
                       {"threshold", num(sol.thresholds[r])},
                       {"mean_raw_score",
                        num(from_log_score(LogScore(sol.region_dists[r].mean()), sol.scale))}});
  }
  j["regions"] = std::move(regions);
  json counts = json::array();
  for (std::size_t g = 0; g < sol.groups.size(); ++g) {
    for (std::size_t r = 0; r < sol.regions.size(); ++r) {
      counts.push_back(
          {{"group", sol.groups[g]}, {"region", sol.regions[r]}, {"n", num(sol.count(g, r))}});
    }
  }
  j["counts"] = std::move(counts);
  json rates = json::object();
  for (std::size_t g = 0; g < sol.groups.size(); ++g) {
    rates[sol.groups[g]] = num(sol.group_admit_rate(g));
  }
  j["group_admit_rates"] = std::move(rates);
  j["loss"] = num(sol.loss);
  json res = json::object();
  for (const auto& [name, v] : sol.residuals) res[name] = num(v);
  j["residuals"] = std::move(res);
  j["converged"] = sol.converged;
  j["evaluations"] = sol.evaluations;
  j["best_restart"] = sol.best_restart;
  return j;
}

FitSolution fit_from_json(const json& j, const Reader& rd, const std::string& path) {
  FitSolution sol;
  const json& groups = rd.array(j, path, "groups");
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (!groups[i].is_string()) {
      parse_fail(rd.source(), path + ".groups[" + std::to_string(i) + "]", "expected a string");
    }
    sol.groups.push_back(groups[i].get<std::string>());
  }
  const json& scale_obj = rd.field(j, path, "scale");
  sol.scale = ScoreScale(rd.number(scale_obj, path + ".scale", "s_min"),
                         rd.number(scale_obj, path + ".scale", "s_max"));
  const json& regions = rd.array(j, path, "regions");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const std::string at = path + ".regions[" + std::to_string(i) + "]";
    sol.regions.push_back(rd.string(regions[i], at, "id"));
    sol.region_dists.emplace_back(rd.number(regions[i], at, "shape"),
                                  rd.number(regions[i], at, "scale_param"));
    sol.thresholds.push_back(LogScore(rd.number(regions[i], at, "threshold")).value());
  }
  std::vector<DemographicTable::Entry> entries;
  const json& counts = rd.array(j, path, "counts");
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const std::string at = path + ".counts[" + std::to_string(i) + "]";
    entries.push_back({rd.string(counts[i], at, "group"), rd.string(counts[i], at, "region"),
                       rd.number(counts[i], at, "n")});
  }
  const DemographicTable table = DemographicTable::from_entries(entries);
  if (table.groups() != sol.groups || table.regions() != sol.regions) {
    parse_fail(rd.source(), path + ".counts", "cells do not match groups x regions");
  }
  for (std::size_t g = 0; g < sol.groups.size(); ++g) {
    for (std::size_t r = 0; r < sol.regions.size(); ++r) sol.counts.push_back(table.count(g, r));
  }
  sol.loss = rd.number(j, path, "loss");
  sol.residuals = rd.number_map(j, path, "residuals");
  sol.converged = rd.boolean(j, path, "converged");
  sol.evaluations = rd.unsigned_int(j, path, "evaluations");
  sol.best_restart = rd.unsigned_int(j, path, "best_restart");
  return sol;
}

json density_json(const DensityGrid& d) {
  json j;
  json q = json::array(), raw = json::array(), overall = json::array();
  for (double v : d.q) q.push_back(num(v));
  for (double v : d.raw_score) raw.push_back(num(v));
  for (double v : d.overall) overall.push_back(num(v));
  j["q"] = std::move(q);
  j["raw_score"] = std::move(raw);
  j["overall"] = std::move(overall);
  json regions = json::array();
  for (std::size_t r = 0; r < d.regions.size(); ++r) {
    json dens = json::array();
    for (double v : d.region_density[r]) dens.push_back(num(v));
    regions.push_back({{"id", d.regions[r]}, {"density", std::move(dens)}});
  }
  j["regions"] = std::move(regions);
  return j;
}

DensityGrid density_from_json(const json& j, const Reader& rd, const std::string& path) {
  DensityGrid d;
  d.q = rd.numbers(j, path, "q");
  d.raw_score = rd.numbers(j, path, "raw_score");
  d.overall = rd.numbers(j, path, "overall");
  const json& regions = rd.array(j, path, "regions");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const std::string at = path + ".regions[" + std::to_string(i) + "]";
    d.regions.push_back(rd.string(regions[i], at, "id"));
    d.region_density.push_back(rd.numbers(regions[i], at, "density"));
    if (d.region_density.back().size() != d.q.size()) {
      parse_fail(rd.source(), at + ".density", "length differs from q grid");
    }
  }
  if (d.raw_score.size() != d.q.size() || d.overall.size() != d.q.size()) {
    parse_fail(rd.source(), path, "grid columns differ in length");
  }
  return d;
}

// ---------------------------------------------------------------------------
// CSV

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    std::string_view cell = line.substr(start, comma == std::string_view::npos
                                                   ? std::string_view::npos
                                                   : comma - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
    out.emplace_back(cell);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

struct CsvRow {
  std::size_t line;
  std::vector<std::string> cells;
};

std::vector<CsvRow> read_csv(std::string_view text, std::string_view source,
                             const std::vector<std::string>& header) {
  std::vector<CsvRow> rows;
  bool saw_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  // Tolerate a UTF-8 byte-order mark.
  if (text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    auto cells = split_csv_line(line);
    if (!saw_header) {
      if (cells != header) {
        std::string expected;
        for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
        raise(ErrorKind::kParse, std::string(source) + ": line " + std::to_string(line_no) +
                                     ": expected header '" + expected + "'");
      }
      saw_header = true;
      continue;
    }
    if (cells.size() != header.size()) {
      raise(ErrorKind::kParse, std::string(source) + ": line " + std::to_string(line_no) +
                                   ": expected " + std::to_string(header.size()) + " columns");
    }
    rows.push_back({line_no, std::move(cells)});
  }
  if (!saw_header) raise(ErrorKind::kParse, std::string(source) + ": missing header");
  if (rows.empty()) raise(ErrorKind::kValidation, std::string(source) + ": no data rows");
  return rows;
}

double csv_number(const CsvRow& row, std::size_t col, const std::string& column,
                  std::string_view source) {
  const std::string& s = row.cells[col];
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    raise(ErrorKind::kParse, std::string(source) + ": line " + std::to_string(row.line) +
                                 ", column '" + column + "': invalid number '" + s + "'");
  }
  return v;
}

const std::vector<std::string> kGroupHeader = {"group", "applicants", "admits"};
const std::vector<std::string> kQuantileHeader = {"gpa_cut", "applicant_frac_at_or_above",
                                                  "admit_frac_at_or_above"};

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::kIo, "cannot open '" + path + "' for reading");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorKind::kIo, "cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) raise(ErrorKind::kIo, "failed writing '" + path + "'");
}

PopulationFile parse_population_text(std::string_view text, std::string_view source) {
  const json doc = parse_json_document(text, source);
  Reader rd(source);
  rd.check_version(doc);
  return population_from_json(doc, rd, "$");
}

PopulationFile parse_population(const std::string& path) {
  return parse_population_text(read_file(path), path);
}

std::string population_to_text(const PopulationFile& file) {
  return population_json(file).dump(2) + "\n";
}

void write_population(const PopulationFile& file, const std::string& path) {
  write_file(path, population_to_text(file));
}

SummaryStats parse_summary_stats_text(std::string_view groups_csv,
                                      std::string_view quantiles_csv, const ScoreScale& scale) {
  SummaryStats stats;
  stats.scale = scale;
  for (const auto& row : read_csv(groups_csv, "groups csv", kGroupHeader)) {
    stats.groups.push_back(row.cells[0]);
    stats.applicants.push_back(csv_number(row, 1, "applicants", "groups csv"));
    stats.admits.push_back(csv_number(row, 2, "admits", "groups csv"));
  }
  for (const auto& row : read_csv(quantiles_csv, "quantiles csv", kQuantileHeader)) {
    stats.quantiles.push_back({csv_number(row, 0, "gpa_cut", "quantiles csv"),
                               csv_number(row, 1, kQuantileHeader[1], "quantiles csv"),
                               csv_number(row, 2, kQuantileHeader[2], "quantiles csv")});
  }
  std::stable_sort(stats.quantiles.begin(), stats.quantiles.end(),
                   [](const auto& a, const auto& b) { return a.raw_score > b.raw_score; });
  validate_summary_stats(stats);
  return stats;
}

SummaryStats parse_summary_stats(const std::string& groups_path,
                                 const std::string& quantiles_path, const ScoreScale& scale) {
  return parse_summary_stats_text(read_file(groups_path), read_file(quantiles_path), scale);
}

void write_summary_stats(const SummaryStats& stats, const std::string& groups_path,
                         const std::string& quantiles_path) {
  std::string groups = "group,applicants,admits\n";
  for (std::size_t g = 0; g < stats.groups.size(); ++g) {
    groups += stats.groups[g] + "," + format_double(stats.applicants[g]) + "," +
              format_double(stats.admits[g]) + "\n";
  }
  std::string quantiles = "gpa_cut,applicant_frac_at_or_above,admit_frac_at_or_above\n";
  for (const auto& qp : stats.quantiles) {
    quantiles += format_double(qp.raw_score) + "," + format_double(qp.applicant_frac) + "," +
                 format_double(qp.admit_frac) + "\n";
  }
  write_file(groups_path, groups);
  write_file(quantiles_path, quantiles);
}

DensityGrid make_density_grid(const Population& pop, std::size_t points) {
  double q_hi = 0.0;
  for (const auto& d : pop.region_dists()) {
    q_hi = std::max(q_hi, gamma_quantile(d, 0.999).value());
  }
  double q_lo = 1e-4;
  if (q_hi <= q_lo) q_lo = 1e-3 * q_hi;

  DensityGrid grid;
  grid.q = log_spaced_grid(q_lo, q_hi, points);
  grid.regions = pop.table().regions();
  grid.overall.assign(points, 0.0);
  const double total = pop.total();
  for (std::size_t r = 0; r < grid.regions.size(); ++r) {
    const double weight = total > 0.0 ? pop.table().region_total(r) / total : 0.0;
    std::vector<double> dens(points);
    for (std::size_t i = 0; i < points; ++i) {
      dens[i] = gamma_pdf(pop.dist(r), LogScore(grid.q[i]));
      grid.overall[i] += weight * dens[i];
    }
    grid.region_density.push_back(std::move(dens));
  }
  grid.raw_score.reserve(points);
  for (double q : grid.q) grid.raw_score.push_back(from_log_score(LogScore(q), pop.scale()));
  return grid;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) raise(ErrorKind::kArgument, "trapezoid: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) sum += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  return sum;
}

std::string report_to_text(const ReportBundle& bundle) {
  json doc;
  doc["version"] = kFormatVersion;
  doc["source"] = bundle.source;
  if (bundle.population) doc["population"] = population_json(*bundle.population);
  json outcomes = json::array();
  for (const auto& o : bundle.outcomes) outcomes.push_back(outcome_json(o));
  doc["outcomes"] = std::move(outcomes);
  json theorems = json::array();
  for (const auto& t : bundle.theorems) theorems.push_back(theorem_json(t));
  doc["theorems"] = std::move(theorems);
  if (bundle.empirical) doc["empirical"] = empirical_json(*bundle.empirical);
  if (bundle.fit) doc["fit"] = fit_json(*bundle.fit);
  if (bundle.density) doc["density"] = density_json(*bundle.density);
  return doc.dump(2) + "\n";
}

ReportBundle report_from_text(std::string_view text, std::string_view source) {
  const json doc = parse_json_document(text, source);
  Reader rd(source);
  rd.check_version(doc);
  ReportBundle bundle;
  bundle.source = rd.string(doc, "$", "source");
  if (rd.has(doc, "population")) {
    bundle.population = population_from_json(rd.field(doc, "$", "population"), rd, "$.population");
  }
  const json& outcomes = rd.array(doc, "$", "outcomes");
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    bundle.outcomes.push_back(
        outcome_from_json(outcomes[i], rd, "$.outcomes[" + std::to_string(i) + "]"));
  }
  const json& theorems = rd.array(doc, "$", "theorems");
  for (std::size_t i = 0; i < theorems.size(); ++i) {
    bundle.theorems.push_back(
        theorem_from_json(theorems[i], rd, "$.theorems[" + std::to_string(i) + "]"));
  }
  if (rd.has(doc, "empirical")) {
    bundle.empirical = empirical_from_json(rd.field(doc, "$", "empirical"), rd, "$.empirical");
  }
  if (rd.has(doc, "fit")) bundle.fit = fit_from_json(rd.field(doc, "$", "fit"), rd, "$.fit");
  if (rd.has(doc, "density")) {
    bundle.density = density_from_json(rd.field(doc, "$", "density"), rd, "$.density");
  }
  return bundle;
}

void emit_report(const ReportBundle& bundle, const std::string& path) {
  write_file(path, report_to_text(bundle));
}

ReportBundle parse_report(const std::string& path) {
  return report_from_text(read_file(path), path);
}

}  // namespace admitsim
