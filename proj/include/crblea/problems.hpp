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

// Bilevel problem abstraction:
//
//   min_{x_u}  F(x_u, x_l*)   s.t.  G_j(x_u, x_l*) <= 0
//   x_l* in argmin_{x_l} { f(x_u, x_l) : g_i(x_u, x_l) <= 0 }
//
// Constraints are always stored in the "<= 0 is feasible" direction.

#ifndef CRBLEA_PROBLEMS_HPP_
#define CRBLEA_PROBLEMS_HPP_

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "crblea/common.hpp"
#include "crblea/ledger.hpp"

namespace crblea {

struct LevelValue {
  double objective = 0.0;
  std::vector<double> constraints;
};

using LevelEvaluator = std::function<LevelValue(const Vector& x_u, const Vector& x_l)>;

struct KnownOptimum {
  double F = 0.0;
  double f = 0.0;
  // One documented optimal point; used for consistency checks.
  Vector x_u;
  Vector x_l;
};

// Immutable after construction; safe to share across concurrent runs.
struct ProblemSpec {
  std::string name;
  int m = 0;
  int n = 0;
  Bounds upper_bounds;
  Bounds lower_bounds;
  int upper_constraints = 0;  // J
  int lower_constraints = 0;  // I
  LevelEvaluator upper_eval;
  LevelEvaluator lower_eval;
  KnownOptimum optimum;
};

// Sum of positive parts; zero iff every constraint is satisfied.
double total_violation(const std::vector<double>& constraints);

struct Evaluation {
  double value = 0.0;
  std::vector<double> constraints;
  bool feasible = true;
  double violation = 0.0;
};

// Each call consumes exactly one FE at its level.
Evaluation evaluate_upper(const ProblemSpec& p, const Vector& x_u, const Vector& x_l,
                          EvalLedger& ledger);
Evaluation evaluate_lower(const ProblemSpec& p, const Vector& x_u, const Vector& x_l,
                          EvalLedger& ledger);

// SMD1..SMD12. The split follows the suite convention r = floor(m/2),
// p = m - r; SMD6 splits its lower block into q and an even s.
ProblemSpec make_smd(int index, int m, int n);

// ToyQuadratic: f = |x_l - x_u - c|^2, F = |x_u - a|^2 + |x_l|^2.
ProblemSpec make_toy(const std::string& variant, int m, const Vector& a, const Vector& c);

// Registry lookup: "smd1".."smd12" (at m, n) and "tq" (a = 0, c = 0, m = n).
ProblemSpec make_problem(const std::string& name, int m, int n);
std::vector<std::string> problem_names();

// Stable identity of a problem instance (name, dimensions, bounds, optimum).
std::string problem_fingerprint(const ProblemSpec& p);

}  // namespace crblea

#endif  // CRBLEA_PROBLEMS_HPP_
