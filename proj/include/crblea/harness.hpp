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

// Experiment runner: batches of seeded runs, paired comparisons and suites,
// with JSON records and CSV traces/tables on disk.

#ifndef CRBLEA_HARNESS_HPP_
#define CRBLEA_HARNESS_HPP_

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crblea/config.hpp"
#include "crblea/problems.hpp"
#include "crblea/stats.hpp"

namespace crblea {

// Shortest decimal text that parses back to the same double.
std::string format_real(double value);

nlohmann::json record_to_json(const RunRecord& record);
RunRecord record_from_json(const nlohmann::json& j);
// Record JSON text with a "timestamp" field; everything else is a pure
// function of the record.
std::string record_document(const RunRecord& record);

// Header `fes_t,best_F,acc_u`, one row per checkpoint.
std::string trace_csv(const RunRecord& record, double known_F);

// Writes through a temporary sibling and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string record_stem(const RunRecord& record);

// Seeds base_seed .. base_seed + runs - 1, up to `cfg.jobs` at a time.
// Records come back in seed order.
std::vector<RunRecord> run_batch(const ProblemSpec& problem, const HarnessConfig& cfg);

// run_batch plus one JSON record and one CSV trace per run in `out_dir`.
std::vector<RunRecord> cmd_run(const HarnessConfig& cfg, const std::filesystem::path& out_dir);

struct ColumnMarks {
  Mark acc_u = Mark::Equivalent;
  Mark acc_l = Mark::Equivalent;
  Mark fes_u = Mark::Equivalent;
  Mark fes_l = Mark::Equivalent;
  Mark fes_t = Mark::Equivalent;
};

struct ComparisonRow {
  std::string problem;
  SummaryRow base;
  SummaryRow variant;
  ColumnMarks marks;  // from the variant's side: "+" is significantly smaller
  double r_rs = 0.0;  // saving of the variant relative to the base, percent
  std::optional<double> variant_model_accuracy;
};

// Builds a row from stored records. Refuses groups whose problem
// fingerprints differ.
ComparisonRow compare_records(const std::vector<RunRecord>& base,
                              const std::vector<RunRecord>& variant);

std::string comparison_csv_header();
std::string comparison_csv_line(const ComparisonRow& row);

// Runs both sides, stores every record and a one-row table in `out_dir`.
ComparisonRow cmd_compare(const HarnessConfig& base, const HarnessConfig& variant,
                          const std::filesystem::path& out_dir);

struct SuiteFailure {
  std::string source;
  std::string message;
};

struct SuiteReport {
  std::vector<ComparisonRow> rows;
  std::vector<SuiteFailure> failures;
  std::vector<std::string> warnings;
  std::optional<double> average_r_rs;
};

// The variant side of a single config: same settings with mode = variant_mode.
HarnessConfig variant_of(const HarnessConfig& base);

// One comparison per *.ini in `config_dir` (sorted by file name). A failing
// instance is recorded and the suite carries on. Writes suite.csv and
// suite.json to `out_dir`.
SuiteReport cmd_suite(const std::filesystem::path& config_dir, const std::filesystem::path& out_dir,
                      const std::function<void(HarnessConfig&)>& override_fn = {});

std::string suite_csv(const SuiteReport& report);
nlohmann::json suite_json(const SuiteReport& report);

}  // namespace crblea

#endif  // CRBLEA_HARNESS_HPP_
