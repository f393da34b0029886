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

// Nested bilevel EA: every upper-level candidate is resolved by a full
// lower-level search before it can be evaluated at the upper level.

#ifndef CRBLEA_NESTED_HPP_
#define CRBLEA_NESTED_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crblea/config.hpp"
#include "crblea/ledger.hpp"
#include "crblea/optimizers.hpp"
#include "crblea/problems.hpp"
#include "crblea/stats.hpp"

namespace crblea {

// An upper-level candidate. The upper objective can only be attached together
// with the resolved lower-level solution.
class UpperIndividual {
 public:
  explicit UpperIndividual(Vector x_u) : x_u_(std::move(x_u)) {}

  const Vector& x_u() const { return x_u_; }
  bool resolved() const { return F_.has_value(); }
  const std::optional<Vector>& x_l_star() const { return x_l_star_; }
  std::optional<double> F() const { return F_; }
  std::optional<double> f_star() const { return f_star_; }
  bool feasible() const { return violation_ == 0.0; }
  // Upper constraint violation plus any violation left at x_l_star.
  double violation() const { return violation_; }
  // Throws ContractViolation when unresolved.
  Fitness fitness() const;

  void resolve(Vector x_l_star, double f_star, double F, double violation);

  std::optional<double> rank_score() const { return rank_score_; }
  std::optional<int> rank_generation() const { return rank_generation_; }
  void set_rank(double score, int network_generation) {
    rank_score_ = score;
    rank_generation_ = network_generation;
  }

 private:
  Vector x_u_;
  std::optional<Vector> x_l_star_;
  std::optional<double> F_;
  std::optional<double> f_star_;
  double violation_ = 0.0;
  std::optional<double> rank_score_;
  std::optional<int> rank_generation_;
};

struct BestPoint {
  std::int64_t fes = 0;
  double value = 0.0;
  bool feasible = true;
};

// Range (max - min) of elitist values over the trailing `window` FEs, using
// the value in effect at the window start. Absent until the history spans
// the full window.
std::optional<double> trailing_range(const std::vector<BestPoint>& history, std::int64_t window);

struct LowerResult {
  Vector x_l_star;
  double f_star = 0.0;
  double violation = 0.0;
  std::int64_t fes = 0;
  std::string stop_reason;
};

// Runs the lower engine on f(x_u, .) until the task budget would be exceeded
// or the elitist value varies less than lower_var_eps over the trailing
// fes_l_var_window lower FEs.
LowerResult lower_level_search(const ProblemSpec& p, const Vector& x_u, const OptimizerConfig& cfg,
                               const TerminationRule& rule, EvalLedger& ledger);

// The best `count` of `pool` under feasibility-first order on (F, violation);
// stable on ties.
std::vector<UpperIndividual> environmental_selection(std::vector<UpperIndividual> pool,
                                                     std::size_t count);

enum class StopReason { Continue, Budget, Stagnation, TargetAccuracy };

std::string to_string(StopReason reason);

StopReason check_upper_termination(const EvalLedger& ledger, const std::vector<BestPoint>& history,
                                   const TerminationRule& rule, double known_F);

// Shared machinery of the nested and ranking-gated loops: one run's problem,
// engines, ledger and upper population.
class BilevelSession {
 public:
  BilevelSession(const ProblemSpec& problem, const HarnessConfig& cfg, std::uint64_t seed);

  // Samples and resolves the initial population.
  void initialize();
  // Lower search plus one upper FE.
  void resolve(UpperIndividual& ind);
  // Offspring proposals from the current parents. With `cap_to_budget` the
  // count never exceeds the remaining upper budget.
  std::vector<UpperIndividual> propose(int count, bool cap_to_budget = true);
  // Resolves every candidate, then adapts the engine and selects survivors.
  void absorb(std::vector<UpperIndividual>& offspring, GenerationStats stats);
  StopReason stop_reason() const;
  std::int64_t remaining_upper_budget() const;

  const std::vector<UpperIndividual>& population() const { return population_; }
  std::vector<UpperIndividual>& population() { return population_; }
  const UpperIndividual& elite() const;
  const ProblemSpec& problem() const { return problem_; }
  const HarnessConfig& config() const { return cfg_; }
  EvalLedger& ledger() { return ledger_; }
  const EvalLedger& ledger() const { return ledger_; }
  Rng& rng() { return rng_; }
  int upper_pop() const { return upper_pop_; }

  RunRecord finish(StopReason reason) const;

 private:
  void record_progress();

  const ProblemSpec& problem_;
  HarnessConfig cfg_;
  std::uint64_t seed_;
  Rng rng_;
  EvalLedger ledger_;
  int upper_pop_;
  OptimizerConfig lower_cfg_;
  UpperVariation variation_;
  std::vector<UpperIndividual> population_;
  std::vector<BestPoint> history_;
  std::vector<GenerationStats> generations_;
};

RunRecord run_nested_blea(const ProblemSpec& p, const HarnessConfig& cfg, std::uint64_t seed);

}  // namespace crblea

#endif  // CRBLEA_NESTED_HPP_
