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

#ifndef CRBLEA_STATS_HPP_
#define CRBLEA_STATS_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crblea/ledger.hpp"

namespace crblea {

inline constexpr double kAccuracyFloor = 1e-6;

// Per-generation resource use, kept for diagnostics and cap checks.
struct GenerationStats {
  std::int64_t fes_u = 0;  // cumulative, after the generation
  int lower_searches = 0;
  std::int64_t lower_fes = 0;
  bool allocated = false;  // ranking-gated generation
  bool resampled = false;
};

struct RunRecord {
  std::string problem;
  std::string mode;
  std::uint64_t seed = 0;
  double acc_u = 0.0;
  double acc_l = 0.0;
  std::int64_t fes_u = 0;
  std::int64_t fes_l = 0;
  std::int64_t fes_t = 0;
  double best_F = 0.0;
  double best_f = 0.0;
  bool best_feasible = true;
  std::vector<double> best_x_u;
  std::vector<double> best_x_l;
  std::string stop_reason;
  std::vector<TracePoint> trace;
  std::vector<double> model_acc_history;
  std::vector<double> training_loss;
  int trainings_done = 0;
  int training_failures = 0;
  int upper_pop = 0;
  int lower_pop = 0;
  std::string population_rule;
  std::string selection_rounding = "ceil";
  int pool_trigger = 0;
  std::vector<GenerationStats> generations;
  std::string config_fingerprint;
  std::string problem_fingerprint;
};

// max(|known - found|, 1e-6).
double accuracy(double found, double known);

// (fes_t_B - fes_t_A) / fes_t_B * 100.
double resource_saving_rate(double fes_t_A, double fes_t_B);

double median(std::vector<double> values);

enum class Mark { Better, Equivalent, Worse };

// "+", "≈" or "-".
std::string to_string(Mark mark);

struct RankSumResult {
  double u = 0.0;  // U statistic of the first sample
  double p_value = 1.0;
  Mark mark = Mark::Equivalent;
};

// Two-sided Wilcoxon rank-sum test of baseline `a` against variant `b`
// (smaller is better). Normal approximation with tie and continuity
// correction. Mark::Better means the variant is significantly smaller.
RankSumResult wilcoxon_ranksum(std::span<const double> a, std::span<const double> b,
                               double alpha = 0.05);
// Same orientation, exact permutation distribution of U (midranks kept).
// Intended for small samples; throws when C(n1+n2, n1) exceeds 2e6.
RankSumResult wilcoxon_ranksum_exact(std::span<const double> a, std::span<const double> b,
                                     double alpha = 0.05);

struct SummaryRow {
  std::string problem;
  std::string mode;
  std::size_t runs = 0;
  double acc_u = 0.0;
  double acc_l = 0.0;
  double fes_u = 0.0;
  double fes_l = 0.0;
  double fes_t = 0.0;
};

// Per-field medians over a homogeneous (problem, mode) group.
SummaryRow aggregate(std::span<const RunRecord> records);

// Mean over every model-accuracy entry of every record; absent when no
// record holds one.
std::optional<double> mean_model_accuracy(std::span<const RunRecord> records);

}  // namespace crblea

#endif  // CRBLEA_STATS_HPP_
