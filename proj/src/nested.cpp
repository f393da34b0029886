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

#include "crblea/nested.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace crblea {

Fitness UpperIndividual::fitness() const {
  if (!F_) throw ContractViolation("upper individual has no upper evaluation");
  return {*F_, violation_};
}

void UpperIndividual::resolve(Vector x_l_star, double f_star, double F, double violation) {
  x_l_star_ = std::move(x_l_star);
  f_star_ = f_star;
  F_ = F;
  violation_ = violation;
}

std::optional<double> trailing_range(const std::vector<BestPoint>& history, std::int64_t window) {
  if (history.empty()) return std::nullopt;
  const std::int64_t start = history.back().fes - window;
  std::size_t first = history.size();
  for (std::size_t i = history.size(); i-- > 0;) {
    if (history[i].fes <= start) {
      first = i;
      break;
    }
  }
  if (first == history.size()) return std::nullopt;
  double lo = history[first].value;
  double hi = lo;
  for (std::size_t i = first; i < history.size(); ++i) {
    lo = std::min(lo, history[i].value);
    hi = std::max(hi, history[i].value);
  }
  return hi - lo;
}

LowerResult lower_level_search(const ProblemSpec& p, const Vector& x_u, const OptimizerConfig& cfg,
                               const TerminationRule& rule, EvalLedger& ledger) {
  const Objective objective = [&](const Vector& x_l) {
    const Evaluation e = evaluate_lower(p, x_u, x_l, ledger);
    return Fitness{e.value, e.violation};
  };
  try {
    if (cfg.pop_size > rule.fes_l_max) {
      throw ConfigurationError("lower population exceeds the lower-level FE budget");
    }
    SearchState state = init_search(cfg, p.lower_bounds, objective);
    auto watched = [&]() -> Fitness {
      if (rule.lower_signal == LowerSignal::BestSoFar) return state.best;
      Fitness b = state.fitness.front();
      for (const auto& f : state.fitness) {
        if (better(f, b)) b = f;
      }
      return b;
    };
    auto mark = [&] {
      const Fitness w = watched();
      return BestPoint{state.evaluations, w.value, w.feasible()};
    };
    std::vector<BestPoint> history{mark()};
    std::string reason;
    while (true) {
      if (state.evaluations + cfg.pop_size > rule.fes_l_max) {
        reason = "budget";
        break;
      }
      const auto range = trailing_range(history, rule.fes_l_var_window);
      if (range && *range < rule.lower_var_eps) {
        reason = "stagnation";
        break;
      }
      step(state, objective, p.lower_bounds);
      history.push_back(mark());
    }
    return {state.best_x, state.best.value, state.best.violation, state.evaluations, reason};
  } catch (const EvaluationError& e) {
    std::ostringstream os;
    os << "lower-level task for x_u=[" << x_u.transpose() << "]: " << e.what();
    throw EvaluationError(os.str(), e.x_u(), e.x_l());
  }
}

std::vector<UpperIndividual> environmental_selection(std::vector<UpperIndividual> pool,
                                                     std::size_t count) {
  if (pool.size() < count) {
    throw ContractViolation("environmental selection: pool smaller than target size");
  }
  for (const auto& ind : pool) {
    if (!ind.resolved()) throw ContractViolation("environmental selection: unevaluated member");
  }
  std::stable_sort(pool.begin(), pool.end(), [](const UpperIndividual& a, const UpperIndividual& b) {
    return better(a.fitness(), b.fitness());
  });
  pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(count), pool.end());
  return pool;
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Budget: return "budget";
    case StopReason::Stagnation: return "stagnation";
    case StopReason::TargetAccuracy: return "target_accuracy";
    default: return "continue";
  }
}

StopReason check_upper_termination(const EvalLedger& ledger, const std::vector<BestPoint>& history,
                                   const TerminationRule& rule, double known_F) {
  if (ledger.fes_u() >= rule.fes_u_max) return StopReason::Budget;
  if (!history.empty() && history.back().feasible &&
      std::abs(history.back().value - known_F) < rule.target_acc) {
    return StopReason::TargetAccuracy;
  }
  const auto range = trailing_range(history, rule.fes_u_var_window);
  if (range && *range < rule.upper_var_eps) return StopReason::Stagnation;
  return StopReason::Continue;
}

BilevelSession::BilevelSession(const ProblemSpec& problem, const HarnessConfig& cfg,
                               std::uint64_t seed)
    : problem_(problem),
      cfg_(cfg),
      seed_(seed),
      rng_(seed),
      upper_pop_(effective_upper_pop(cfg)),
      lower_cfg_(cfg.lower),
      variation_(
          [&] {
            OptimizerConfig u = cfg.upper;
            u.pop_size = effective_upper_pop(cfg);
            return u;
          }(),
          problem.upper_bounds) {
  lower_cfg_.pop_size = effective_lower_pop(cfg);
  validate(lower_cfg_);
}

void BilevelSession::initialize() {
  population_.clear();
  for (int i = 0; i < upper_pop_; ++i) {
    population_.emplace_back(rng_.uniform_in(problem_.upper_bounds));
  }
  const std::int64_t lower_before = ledger_.fes_l();
  for (auto& ind : population_) resolve(ind);
  population_ = environmental_selection(std::move(population_), population_.size());

  std::vector<Vector> xs;
  std::vector<Fitness> fs;
  for (const auto& ind : population_) {
    xs.push_back(ind.x_u());
    fs.push_back(ind.fitness());
  }
  variation_.initialize(xs, fs);

  GenerationStats stats;
  stats.lower_searches = upper_pop_;
  stats.lower_fes = ledger_.fes_l() - lower_before;
  stats.fes_u = ledger_.fes_u();
  generations_.push_back(stats);
  record_progress();
}

void BilevelSession::resolve(UpperIndividual& ind) {
  OptimizerConfig task = lower_cfg_;
  task.seed = rng_.next_seed();
  LowerResult lower = lower_level_search(problem_, ind.x_u(), task, cfg_.termination, ledger_);
  const Evaluation upper = evaluate_upper(problem_, ind.x_u(), lower.x_l_star, ledger_);
  ind.resolve(std::move(lower.x_l_star), lower.f_star, upper.value,
              upper.violation + lower.violation);
}

std::vector<UpperIndividual> BilevelSession::propose(int count, bool cap_to_budget) {
  const auto k = cap_to_budget ? static_cast<int>(std::min<std::int64_t>(
                                     count, std::max<std::int64_t>(0, remaining_upper_budget())))
                               : count;
  std::vector<Vector> parents;
  parents.reserve(population_.size());
  for (const auto& ind : population_) parents.push_back(ind.x_u());
  std::vector<UpperIndividual> out;
  for (auto& x : variation_.generate(parents, k, rng_)) out.emplace_back(std::move(x));
  return out;
}

void BilevelSession::absorb(std::vector<UpperIndividual>& offspring, GenerationStats stats) {
  const std::int64_t lower_before = ledger_.fes_l();
  std::vector<std::pair<Vector, Fitness>> evaluated;
  for (auto& ind : offspring) {
    if (!ind.resolved()) resolve(ind);
    evaluated.emplace_back(ind.x_u(), ind.fitness());
  }
  variation_.adapt(std::move(evaluated));

  std::vector<UpperIndividual> pool = population_;
  pool.insert(pool.end(), offspring.begin(), offspring.end());
  population_ = environmental_selection(std::move(pool), static_cast<std::size_t>(upper_pop_));

  stats.lower_searches = static_cast<int>(offspring.size());
  stats.lower_fes = ledger_.fes_l() - lower_before;
  stats.fes_u = ledger_.fes_u();
  generations_.push_back(stats);
  record_progress();
}

const UpperIndividual& BilevelSession::elite() const {
  if (population_.empty()) throw ContractViolation("session has no population");
  return population_.front();
}

void BilevelSession::record_progress() {
  const auto& e = elite();
  history_.push_back({ledger_.fes_u(), *e.F(), e.feasible()});
  ledger_.checkpoint(*e.F());
}

StopReason BilevelSession::stop_reason() const {
  return check_upper_termination(ledger_, history_, cfg_.termination, problem_.optimum.F);
}

std::int64_t BilevelSession::remaining_upper_budget() const {
  return cfg_.termination.fes_u_max - ledger_.fes_u();
}

RunRecord BilevelSession::finish(StopReason reason) const {
  const auto& e = elite();
  RunRecord r;
  r.problem = problem_.name;
  r.mode = to_string(cfg_.mode);
  r.seed = seed_;
  r.best_F = *e.F();
  r.best_f = *e.f_star();
  r.best_feasible = e.feasible();
  r.acc_u = accuracy(r.best_F, problem_.optimum.F);
  r.acc_l = accuracy(r.best_f, problem_.optimum.f);
  r.best_x_u.assign(e.x_u().begin(), e.x_u().end());
  r.best_x_l.assign(e.x_l_star()->begin(), e.x_l_star()->end());
  r.fes_u = ledger_.fes_u();
  r.fes_l = ledger_.fes_l();
  r.fes_t = ledger_.fes_t();
  r.stop_reason = to_string(reason);
  r.trace = ledger_.trace();
  r.upper_pop = upper_pop_;
  r.lower_pop = lower_cfg_.pop_size;
  r.population_rule = (cfg_.upper.pop_size > 0 || cfg_.lower.pop_size > 0)
                          ? "override"
                          : "4+floor(ln(m+n)) / 4+floor(ln(n))";
  r.generations = generations_;
  r.config_fingerprint = fingerprint(cfg_);
  r.problem_fingerprint = problem_fingerprint(problem_);
  return r;
}

RunRecord run_nested_blea(const ProblemSpec& p, const HarnessConfig& cfg, std::uint64_t seed) {
  BilevelSession session(p, cfg, seed);
  session.initialize();
  StopReason reason;
  while ((reason = session.stop_reason()) == StopReason::Continue) {
    auto offspring = session.propose(session.upper_pop());
    session.absorb(offspring, GenerationStats{});
  }
  return session.finish(reason);
}

}  // namespace crblea
