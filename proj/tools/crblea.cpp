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

// crblea: command-line front end for runs, paired comparisons and suites.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "crblea/harness.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<std::string> mode;
  std::optional<int> jobs;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_config = true) {
  if (with_config) cmd->add_option("--config", f.config, "INI config file")->required();
  cmd->add_option("--out", f.out, "output directory (default: output_dir from the config)");
  cmd->add_option("--seed", f.seed, "base seed; run i uses seed + i");
  cmd->add_option("--runs", f.runs, "number of independent runs");
  cmd->add_option("--mode", f.mode, "nested | cr | cr_no_net | cr_no_resample");
  cmd->add_option("--jobs", f.jobs, "runs executed concurrently");
}

void apply(const CommonFlags& f, crblea::HarnessConfig& cfg) {
  if (f.seed) cfg.base_seed = *f.seed;
  if (f.runs) cfg.runs = *f.runs;
  if (f.mode) cfg.mode = crblea::mode_from_string(*f.mode);
  if (f.jobs) cfg.jobs = *f.jobs;
  crblea::validate(cfg);
}

std::string out_dir(const CommonFlags& f, const crblea::HarnessConfig& cfg) {
  return f.out.empty() ? cfg.output_dir : f.out;
}

void print_row(const crblea::ComparisonRow& row) {
  std::cout << crblea::comparison_csv_header() << crblea::comparison_csv_line(row);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crblea: nested and ranking-gated bilevel evolutionary runs"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  auto* run = app.add_subcommand("run", "independent seeded runs of one config");
  add_common(run, run_flags);

  CommonFlags cmp_flags;
  std::string variant_path;
  std::optional<std::string> variant_mode;
  auto* compare = app.add_subcommand("compare", "base vs variant on the same problem");
  add_common(compare, cmp_flags);
  compare->add_option("--variant", variant_path,
                      "variant config (default: the base config with mode = variant_mode)");
  compare->add_option("--variant-mode", variant_mode, "override the variant's mode");

  CommonFlags suite_flags;
  std::string config_dir;
  auto* suite = app.add_subcommand("suite", "compare across every *.ini in a directory");
  add_common(suite, suite_flags, false);
  suite->add_option("--config-dir", config_dir, "directory of per-instance configs")->required();

  app.add_subcommand("list-problems", "print the registered problem names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (run->parsed()) {
      auto cfg = crblea::load_config(run_flags.config);
      apply(run_flags, cfg);
      const auto records = crblea::cmd_run(cfg, out_dir(run_flags, cfg));
      for (const auto& r : records) {
        std::cout << crblea::record_stem(r) << ": acc_u=" << r.acc_u << " fes_t=" << r.fes_t
                  << " stop=" << r.stop_reason << "\n";
      }
    } else if (compare->parsed()) {
      auto base = crblea::load_config(cmp_flags.config);
      apply(cmp_flags, base);
      crblea::HarnessConfig variant =
          variant_path.empty() ? crblea::variant_of(base) : crblea::load_config(variant_path);
      if (!variant_path.empty()) {
        CommonFlags shared = cmp_flags;
        shared.mode.reset();
        apply(shared, variant);
      }
      if (variant_mode) variant.mode = crblea::mode_from_string(*variant_mode);
      print_row(crblea::cmd_compare(base, variant, out_dir(cmp_flags, base)));
    } else if (suite->parsed()) {
      const std::string out = suite_flags.out.empty() ? "results/suite" : suite_flags.out;
      const auto report = crblea::cmd_suite(config_dir, out, [&](crblea::HarnessConfig& cfg) {
        apply(suite_flags, cfg);
      });
      std::cout << crblea::suite_csv(report);
      return report.failures.empty() ? 0 : 2;
    } else {
      for (const auto& name : crblea::problem_names()) std::cout << name << "\n";
    }
  } catch (const crblea::ConfigurationError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
