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

// Single-level search engines: DE/rand/1/bin and (mu/mu_w, lambda) CMA-ES.
//
// Both engines clip every candidate to the box before it is evaluated and
// evaluate each candidate exactly once. Constraint handling is
// feasibility-first throughout.

#ifndef CRBLEA_OPTIMIZERS_HPP_
#define CRBLEA_OPTIMIZERS_HPP_

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crblea/common.hpp"

namespace crblea {

enum class EngineKind { DE, CMAES };

std::string to_string(EngineKind kind);
EngineKind engine_from_string(const std::string& name);

struct OptimizerConfig {
  EngineKind kind = EngineKind::DE;
  int pop_size = 5;
  double de_scale = 0.5;
  double de_crossover = 0.9;
  // Initial step size as a fraction of each coordinate's range.
  double cma_sigma0 = 0.3;
  std::uint64_t seed = 0;
};

// Throws ConfigurationError when a knob is outside its documented range.
void validate(const OptimizerConfig& config);

struct Fitness {
  double value = 0.0;
  double violation = 0.0;

  bool feasible() const { return violation == 0.0; }
};

// Feasible beats infeasible; feasibles order by value; infeasibles order by
// total violation.
std::weak_ordering feasibility_first_compare(const Fitness& a, const Fitness& b);

inline bool better(const Fitness& a, const Fitness& b) {
  return feasibility_first_compare(a, b) < 0;
}

using Objective = std::function<Fitness(const Vector&)>;

// CMA-ES search distribution. Works in unit-cube coordinates of the box it
// was built for, so the step size is a fraction of each coordinate's range.
class CmaesModel {
 public:
  CmaesModel(const Bounds& bounds, const Vector& mean, double sigma0);

  // Draws `count` candidates, clipped to the box.
  std::vector<Vector> sample(int count, Rng& rng) const;
  // One generation update from evaluated candidates ranked best first. The
  // recombination size and weights follow the number of candidates given.
  void update(const std::vector<Vector>& ranked);

  const Vector& mean() const { return mean_; }  // unit-cube coordinates
  double sigma() const { return sigma_; }
  const Matrix& covariance() const { return cov_; }
  double smallest_eigenvalue() const { return eigenvalues_.minCoeff(); }
  int generation() const { return generation_; }

 private:
  void decompose();

  Bounds bounds_;
  Eigen::Index dim_;
  Vector mean_;
  double sigma_;
  Matrix cov_;
  Matrix basis_;
  Vector eigenvalues_;
  Vector path_sigma_;
  Vector path_cov_;
  int generation_ = 0;
};

// rand/1/bin trial vectors, one per target parents[i % N], i < count.
std::vector<Vector> de_variation(const std::vector<Vector>& parents, int count,
                                 const OptimizerConfig& config, const Bounds& bounds, Rng& rng);

struct SearchState {
  OptimizerConfig config;
  std::vector<Vector> population;
  std::vector<Fitness> fitness;
  Vector best_x;
  Fitness best;
  int generation = 0;
  std::int64_t evaluations = 0;
  std::optional<CmaesModel> cma;
  Rng rng{0};
};

SearchState init_search(const OptimizerConfig& config, const Bounds& bounds,
                        const Objective& objective);

// Advances one generation; evaluates exactly pop_size new candidates.
void step(SearchState& state, const Objective& objective, const Bounds& bounds);

// Upper-level variation used by the bilevel loops: proposes offspring from
// the current parent population and adapts from the evaluated ones.
class UpperVariation {
 public:
  UpperVariation(const OptimizerConfig& config, const Bounds& bounds);

  void initialize(const std::vector<Vector>& parents, const std::vector<Fitness>& fitness);
  std::vector<Vector> generate(const std::vector<Vector>& parents, int count, Rng& rng) const;
  // `evaluated` holds the offspring that were actually resolved and evaluated.
  void adapt(std::vector<std::pair<Vector, Fitness>> evaluated);

  const OptimizerConfig& config() const { return config_; }

 private:
  OptimizerConfig config_;
  Bounds bounds_;
  std::optional<CmaesModel> cma_;
};

}  // namespace crblea

#endif  // CRBLEA_OPTIMIZERS_HPP_
