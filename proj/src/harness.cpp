// Copyright 2026 The crblea Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "crblea/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <ctime>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "crblea/crframework.hpp"

namespace crblea {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_real(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

json record_to_json(const RunRecord& r) {
  json j;
  j["problem"] = r.problem;
  j["mode"] = r.mode;
  j["seed"] = r.seed;
  j["acc_u"] = r.acc_u;
  j["acc_l"] = r.acc_l;
  j["fes_u"] = r.fes_u;
  j["fes_l"] = r.fes_l;
  j["fes_t"] = r.fes_t;
  j["best_F"] = r.best_F;
  j["best_f"] = r.best_f;
  j["best_feasible"] = r.best_feasible;
  j["best_x_u"] = r.best_x_u;
  j["best_x_l"] = r.best_x_l;
  j["stop_reason"] = r.stop_reason;
  json trace = json::array();
  for (const auto& t : r.trace) trace.push_back({t.fes_t, t.best_F});
  j["trace"] = std::move(trace);
  j["model_acc_history"] = r.model_acc_history;
  j["training_loss"] = r.training_loss;
  j["trainings_done"] = r.trainings_done;
  j["training_failures"] = r.training_failures;
  j["upper_pop"] = r.upper_pop;
  j["lower_pop"] = r.lower_pop;
  j["population_rule"] = r.population_rule;
  j["selection_rounding"] = r.selection_rounding;
  j["pool_trigger"] = r.pool_trigger;
  json gens = json::array();
  for (const auto& g : r.generations) {
    gens.push_back({{"fes_u", g.fes_u},
                    {"lower_searches", g.lower_searches},
                    {"lower_fes", g.lower_fes},
                    {"allocated", g.allocated},
                    {"resampled", g.resampled}});
  }
  j["generations"] = std::move(gens);
  j["config_fingerprint"] = r.config_fingerprint;
  j["problem_fingerprint"] = r.problem_fingerprint;
  return j;
}

RunRecord record_from_json(const json& j) {
  RunRecord r;
  try {
    r.problem = j.at("problem").get<std::string>();
    r.mode = j.at("mode").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.acc_u = j.at("acc_u").get<double>();
    r.acc_l = j.at("acc_l").get<double>();
    r.fes_u = j.at("fes_u").get<std::int64_t>();
    r.fes_l = j.at("fes_l").get<std::int64_t>();
    r.fes_t = j.at("fes_t").get<std::int64_t>();
    r.best_F = j.at("best_F").get<double>();
    r.best_f = j.at("best_f").get<double>();
    r.best_feasible = j.at("best_feasible").get<bool>();
    r.best_x_u = j.at("best_x_u").get<std::vector<double>>();
    r.best_x_l = j.at("best_x_l").get<std::vector<double>>();
    r.stop_reason = j.at("stop_reason").get<std::string>();
    for (const auto& t : j.at("trace")) {
      r.trace.push_back({t.at(0).get<std::int64_t>(), t.at(1).get<double>()});
    }
    r.model_acc_history = j.at("model_acc_history").get<std::vector<double>>();
    r.training_loss = j.at("training_loss").get<std::vector<double>>();
    r.trainings_done = j.at("trainings_done").get<int>();
    r.training_failures = j.at("training_failures").get<int>();
    r.upper_pop = j.at("upper_pop").get<int>();
    r.lower_pop = j.at("lower_pop").get<int>();
    r.population_rule = j.at("population_rule").get<std::string>();
    r.selection_rounding = j.at("selection_rounding").get<std::string>();
    r.pool_trigger = j.at("pool_trigger").get<int>();
    for (const auto& g : j.at("generations")) {
      GenerationStats s;
      s.fes_u = g.at("fes_u").get<std::int64_t>();
      s.lower_searches = g.at("lower_searches").get<int>();
      s.lower_fes = g.at("lower_fes").get<std::int64_t>();
      s.allocated = g.at("allocated").get<bool>();
      s.resampled = g.at("resampled").get<bool>();
      r.generations.push_back(s);
    }
    r.config_fingerprint = j.at("config_fingerprint").get<std::string>();
    r.problem_fingerprint = j.at("problem_fingerprint").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("malformed run record: ") + e.what());
  }
  return r;
}

std::string record_document(const RunRecord& record) {
  json j = record_to_json(record);
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  j["timestamp"] = stamp;
  return j.dump(2) + "\n";
}

std::string trace_csv(const RunRecord& record, double known_F) {
  std::string out = "fes_t,best_F,acc_u\n";
  for (const auto& t : record.trace) {
    out += std::to_string(t.fes_t);
    out += ',';
    out += format_real(t.best_F);
    out += ',';
    out += format_real(accuracy(t.best_F, known_F));
    out += '\n';
  }
  return out;
}

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) {
      throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " +
                               ec.message());
    }
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os << content;
    if (!os) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string());
}

std::string record_stem(const RunRecord& record) {
  return record.problem + "_" + record.mode + "_seed" + std::to_string(record.seed);
}

std::vector<RunRecord> run_batch(const ProblemSpec& problem, const HarnessConfig& cfg) {
  validate(cfg);
  const auto runs = static_cast<std::size_t>(cfg.runs);
  std::vector<RunRecord> records(runs);
  std::vector<std::exception_ptr> errors(runs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < runs; i = next++) {
      try {
        records[i] = run_mode(problem, cfg, cfg.base_seed + i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto jobs = std::clamp<std::size_t>(static_cast<std::size_t>(cfg.jobs), 1, runs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return records;
}

std::vector<RunRecord> cmd_run(const HarnessConfig& cfg, const fs::path& out_dir) {
  const ProblemSpec problem = make_problem(cfg.problem, cfg.m, cfg.n);
  std::vector<RunRecord> records = run_batch(problem, cfg);
  for (const auto& r : records) {
    const std::string stem = record_stem(r);
    write_atomic(out_dir / (stem + ".json"), record_document(r));
    write_atomic(out_dir / (stem + "_trace.csv"), trace_csv(r, problem.optimum.F));
  }
  return records;
}

namespace {

Mark column_mark(const std::vector<RunRecord>& a, const std::vector<RunRecord>& b,
                 double RunRecord::*field) {
  std::vector<double> xa, xb;
  for (const auto& r : a) xa.push_back(r.*field);
  for (const auto& r : b) xb.push_back(r.*field);
  return wilcoxon_ranksum(xa, xb).mark;
}

Mark column_mark(const std::vector<RunRecord>& a, const std::vector<RunRecord>& b,
                 std::int64_t RunRecord::*field) {
  std::vector<double> xa, xb;
  for (const auto& r : a) xa.push_back(static_cast<double>(r.*field));
  for (const auto& r : b) xb.push_back(static_cast<double>(r.*field));
  return wilcoxon_ranksum(xa, xb).mark;
}

std::string sci(double v) {
  std::ostringstream os;
  os.setf(std::ios::scientific);
  os.precision(2);
  os << v;
  return os.str();
}

}  // namespace

ComparisonRow compare_records(const std::vector<RunRecord>& base,
                              const std::vector<RunRecord>& variant) {
  if (base.size() < 2 || variant.size() < 2) {
    throw ConfigurationError("comparison needs at least two runs per side");
  }
  const std::string& fp = base.front().problem_fingerprint;
  for (const auto* side : {&base, &variant}) {
    for (const auto& r : *side) {
      if (r.problem_fingerprint != fp) {
        throw ConfigurationError("comparison refuses records with mismatched problem fingerprints");
      }
    }
  }
  ComparisonRow row;
  row.problem = base.front().problem;
  row.base = aggregate(base);
  row.variant = aggregate(variant);
  row.marks.acc_u = column_mark(base, variant, &RunRecord::acc_u);
  row.marks.acc_l = column_mark(base, variant, &RunRecord::acc_l);
  row.marks.fes_u = column_mark(base, variant, &RunRecord::fes_u);
  row.marks.fes_l = column_mark(base, variant, &RunRecord::fes_l);
  row.marks.fes_t = column_mark(base, variant, &RunRecord::fes_t);
  row.r_rs = resource_saving_rate(row.variant.fes_t, row.base.fes_t);
  row.variant_model_accuracy = mean_model_accuracy(variant);
  return row;
}

std::string comparison_csv_header() {
  return "problem,base_mode,variant_mode,runs,"
         "base_Acc_u,base_Acc_l,base_FEs_u,base_FEs_l,base_FEs_t,"
         "variant_Acc_u,variant_Acc_l,variant_FEs_u,variant_FEs_l,variant_FEs_t,"
         "R_rs,mark_Acc_u,mark_Acc_l,mark_FEs_u,mark_FEs_l,mark_FEs_t,variant_model_acc\n";
}

std::string comparison_csv_line(const ComparisonRow& row) {
  std::ostringstream os;
  os << row.problem << ',' << row.base.mode << ',' << row.variant.mode << ',' << row.base.runs;
  for (const SummaryRow* s : {&row.base, &row.variant}) {
    os << ',' << sci(s->acc_u) << ',' << sci(s->acc_l) << ',' << sci(s->fes_u) << ','
       << sci(s->fes_l) << ',' << sci(s->fes_t);
  }
  std::ostringstream pct;
  pct.setf(std::ios::fixed);
  pct.precision(1);
  pct << row.r_rs << '%';
  os << ',' << pct.str() << ',' << to_string(row.marks.acc_u) << ',' << to_string(row.marks.acc_l)
     << ',' << to_string(row.marks.fes_u) << ',' << to_string(row.marks.fes_l) << ','
     << to_string(row.marks.fes_t) << ',';
  if (row.variant_model_accuracy) os << format_real(*row.variant_model_accuracy);
  os << '\n';
  return os.str();
}

ComparisonRow cmd_compare(const HarnessConfig& base, const HarnessConfig& variant,
                          const fs::path& out_dir) {
  if (base.problem != variant.problem || base.m != variant.m || base.n != variant.n) {
    throw ConfigurationError("compare: base and variant configs name different problems");
  }
  if (base.runs != variant.runs) {
    throw ConfigurationError("compare: base and variant configs differ in 'runs'");
  }
  const auto a = cmd_run(base, out_dir);
  const auto b = cmd_run(variant, out_dir);
  ComparisonRow row = compare_records(a, b);
  write_atomic(out_dir / (row.problem + "_" + row.base.mode + "_vs_" + row.variant.mode + ".csv"),
               comparison_csv_header() + comparison_csv_line(row));
  return row;
}

HarnessConfig variant_of(const HarnessConfig& base) {
  HarnessConfig v = base;
  v.mode = base.variant_mode;
  return v;
}

std::string suite_csv(const SuiteReport& report) {
  std::string out = comparison_csv_header();
  for (const auto& row : report.rows) out += comparison_csv_line(row);
  std::ostringstream footer;
  footer << "Average R_rs,,,,,,,,,,,,,,";
  if (report.average_r_rs) {
    footer.setf(std::ios::fixed);
    footer.precision(1);
    footer << *report.average_r_rs << '%';
  }
  footer << ",,,,,,\n";
  return out + footer.str();
}

json suite_json(const SuiteReport& report) {
  json j;
  json rows = json::array();
  for (const auto& row : report.rows) {
    json r;
    r["problem"] = row.problem;
    r["base_mode"] = row.base.mode;
    r["variant_mode"] = row.variant.mode;
    r["runs"] = row.base.runs;
    for (const auto& [name, s] : {std::pair{"base", &row.base}, std::pair{"variant", &row.variant}}) {
      r[name] = {{"acc_u", s->acc_u}, {"acc_l", s->acc_l}, {"fes_u", s->fes_u},
                 {"fes_l", s->fes_l}, {"fes_t", s->fes_t}};
    }
    r["r_rs"] = row.r_rs;
    r["marks"] = {{"acc_u", to_string(row.marks.acc_u)}, {"acc_l", to_string(row.marks.acc_l)},
                  {"fes_u", to_string(row.marks.fes_u)}, {"fes_l", to_string(row.marks.fes_l)},
                  {"fes_t", to_string(row.marks.fes_t)}};
    if (row.variant_model_accuracy) r["variant_model_accuracy"] = *row.variant_model_accuracy;
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  json failures = json::array();
  for (const auto& f : report.failures) failures.push_back({{"source", f.source}, {"message", f.message}});
  j["failures"] = std::move(failures);
  j["warnings"] = report.warnings;
  j["average_r_rs"] = report.average_r_rs ? json(*report.average_r_rs) : json(nullptr);
  return j;
}

SuiteReport cmd_suite(const fs::path& config_dir, const fs::path& out_dir,
                      const std::function<void(HarnessConfig&)>& override_fn) {
  SuiteReport report;
  std::vector<fs::path> configs;
  std::error_code ec;
  if (fs::is_directory(config_dir, ec)) {
    for (const auto& entry : fs::directory_iterator(config_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".ini") {
        configs.push_back(entry.path());
      }
    }
  } else {
    report.warnings.push_back("config directory " + config_dir.string() + " does not exist");
  }
  std::sort(configs.begin(), configs.end());
  if (configs.empty() && report.warnings.empty()) {
    report.warnings.push_back("no *.ini configs found in " + config_dir.string());
  }
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";

  double sum = 0.0;
  for (const auto& path : configs) {
    try {
      HarnessConfig base = load_config(path.string());
      if (override_fn) override_fn(base);
      const HarnessConfig variant = variant_of(base);
      report.rows.push_back(cmd_compare(base, variant, out_dir / path.stem()));
      sum += report.rows.back().r_rs;
    } catch (const std::exception& e) {
      report.failures.push_back({path.filename().string(), e.what()});
      std::cerr << "error: " << path.filename().string() << ": " << e.what() << "\n";
    }
  }
  if (!report.rows.empty()) report.average_r_rs = sum / static_cast<double>(report.rows.size());
  write_atomic(out_dir / "suite.csv", suite_csv(report));
  write_atomic(out_dir / "suite.json", suite_json(report).dump(2) + "\n");
  return report;
}

}  // namespace crblea
