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


#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "crblea/crframework.hpp"
#include "crblea/harness.hpp"

using namespace crblea;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           ("crblea_" + tag + "_" + std::to_string(std::hash<std::string>{}(tag)) + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

HarnessConfig toy_config() {
  HarnessConfig cfg;
  cfg.problem = "tq";
  cfg.m = cfg.n = 2;
  cfg.runs = 1;
  cfg.base_seed = 3;
  cfg.termination.fes_u_max = 300;
  return cfg;
}

}  // namespace

TEST_CASE("run writes one record and one trace per seed") {
  TempDir dir("run");
  const auto records = cmd_run(toy_config(), dir.path);
  REQUIRE(records.size() == 1);
  const fs::path json_path = dir.path / "tq_nested_seed3.json";
  const fs::path csv_path = dir.path / "tq_nested_seed3_trace.csv";
  CHECK(fs::exists(json_path));
  CHECK(fs::exists(csv_path));
  int files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path)) ++files;
  CHECK(files == 2);
  const std::string csv = slurp(csv_path);
  CHECK(csv.rfind("fes_t,best_F,acc_u\n", 0) == 0);
}

TEST_CASE("reruns are identical apart from the timestamp") {
  TempDir a("rerun_a"), b("rerun_b");
  cmd_run(toy_config(), a.path);
  cmd_run(toy_config(), b.path);
  auto ja = nlohmann::json::parse(slurp(a.path / "tq_nested_seed3.json"));
  auto jb = nlohmann::json::parse(slurp(b.path / "tq_nested_seed3.json"));
  CHECK(ja.contains("timestamp"));
  ja.erase("timestamp");
  jb.erase("timestamp");
  CHECK(ja.dump() == jb.dump());
  CHECK(slurp(a.path / "tq_nested_seed3_trace.csv") ==
        slurp(b.path / "tq_nested_seed3_trace.csv"));
}

TEST_CASE("parallel batches match sequential ones") {
  HarnessConfig cfg = toy_config();
  cfg.runs = 3;
  const ProblemSpec p = make_problem("tq", 2, 2);
  const auto seq = run_batch(p, cfg);
  cfg.jobs = 3;
  const auto par = run_batch(p, cfg);
  REQUIRE(seq.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(seq[i].seed == cfg.base_seed + i);
    CHECK(record_to_json(seq[i]).dump() == record_to_json(par[i]).dump());
  }
}

TEST_CASE("record JSON round-trip") {
  const ProblemSpec p = make_smd(1, 2, 3);
  HarnessConfig cfg;
  cfg.mode = Mode::CR;
  cfg.termination.fes_u_max = 150;
  const RunRecord r = run_mode(p, cfg, 9);
  const RunRecord back = record_from_json(nlohmann::json::parse(record_document(r)));
  CHECK(record_to_json(back).dump() == record_to_json(r).dump());
  CHECK(back.fes_t == back.fes_u + back.fes_l);
  CHECK_THROWS_AS(record_from_json(nlohmann::json::parse("{\"problem\": 3}")), ConfigurationError);
}

TEST_CASE("format_real round-trips") {
  for (double v : {0.1, 1e-6, 123456.789, -2.5e-300, 3.0}) {
    CHECK(std::stod(format_real(v)) == v);
  }
}

TEST_CASE("comparison rows and tables") {
  const ProblemSpec p = make_problem("tq", 2, 2);
  HarnessConfig cfg = toy_config();
  cfg.runs = 3;
  const auto base = run_batch(p, cfg);
  cfg.mode = Mode::CRNoNet;
  const auto variant = run_batch(p, cfg);
  const ComparisonRow row = compare_records(base, variant);
  CHECK(row.problem == "tq");
  CHECK(row.base.runs == 3);
  CHECK(row.r_rs == doctest::Approx(resource_saving_rate(row.variant.fes_t, row.base.fes_t)));
  const std::string line = comparison_csv_line(row);
  CHECK(line.rfind("tq,nested,cr_no_net,3,", 0) == 0);
  CHECK(line.find('%') != std::string::npos);
  CHECK(comparison_csv_header().find("base_FEs_t") != std::string::npos);

  auto other = run_batch(make_smd(1, 2, 3), [] {
    HarnessConfig c;
    c.runs = 2;
    c.termination.fes_u_max = 20;
    return c;
  }());
  CHECK_THROWS_AS(compare_records(base, other), ConfigurationError);
  CHECK_THROWS_AS(compare_records({base.front()}, variant), ConfigurationError);
}

TEST_CASE("compare refuses mismatched configs") {
  TempDir dir("cmp");
  HarnessConfig a = toy_config();
  HarnessConfig b = a;
  b.runs = 2;
  CHECK_THROWS_AS(cmd_compare(a, b, dir.path), ConfigurationError);
  b = a;
  b.problem = "smd1";
  b.m = 2;
  b.n = 3;
  CHECK_THROWS_AS(cmd_compare(a, b, dir.path), ConfigurationError);
}

TEST_CASE("suite over an empty directory warns and writes an empty table") {
  TempDir cfgs("suite_cfg"), out("suite_out");
  const SuiteReport r = cmd_suite(cfgs.path, out.path);
  CHECK(r.rows.empty());
  CHECK(r.warnings.size() == 1);
  CHECK_FALSE(r.average_r_rs.has_value());
  CHECK(fs::exists(out.path / "suite.csv"));
  CHECK(fs::exists(out.path / "suite.json"));
}

TEST_CASE("suite continues past a broken config") {
  TempDir cfgs("suite_mixed"), out("suite_mixed_out");
  {
    std::ofstream(cfgs.path / "a_bad.ini") << "problem = smd1\nnot_a_key = 1\n";
    std::ofstream(cfgs.path / "b_toy.ini")
        << "problem = tq\nm = 2\nn = 2\nruns = 2\nvariant_mode = cr_no_net\n"
           "[termination]\nfes_u_max = 120\n";
  }
  const SuiteReport r = cmd_suite(cfgs.path, out.path);
  REQUIRE(r.failures.size() == 1);
  CHECK(r.failures[0].source == "a_bad.ini");
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].variant.mode == "cr_no_net");
  CHECK(r.average_r_rs.has_value());
  const std::string csv = slurp(out.path / "suite.csv");
  CHECK(csv.find("Average R_rs") != std::string::npos);
  CHECK(fs::exists(out.path / "b_toy" / "tq_nested_seed1.json"));
}
