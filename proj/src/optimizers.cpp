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

#include "crblea/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace crblea {

namespace {

constexpr double kEigenFloor = 1e-14;

std::vector<std::size_t> rank_order(const std::vector<Fitness>& fitness) {
  std::vector<std::size_t> order(fitness.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return better(fitness[a], fitness[b]); });
  return order;
}

void track_best(SearchState& state, const Vector& x, const Fitness& f) {
  if (state.evaluations == 0 || better(f, state.best)) {
    state.best = f;
    state.best_x = x;
  }
  ++state.evaluations;
}

}  // namespace

std::string to_string(EngineKind kind) { return kind == EngineKind::DE ? "de" : "cmaes"; }

EngineKind engine_from_string(const std::string& name) {
  if (name == "de") return EngineKind::DE;
  if (name == "cmaes" || name == "cma-es") return EngineKind::CMAES;
  throw ConfigurationError("unknown optimizer '" + name + "' (expected de or cmaes)");
}

void validate(const OptimizerConfig& config) {
  if (config.kind == EngineKind::DE) {
    if (config.pop_size < 4) throw ConfigurationError("DE needs pop_size >= 4");
    if (!(config.de_scale > 0.0 && config.de_scale <= 2.0)) {
      throw ConfigurationError("de_scale must lie in (0, 2]");
    }
    if (!(config.de_crossover >= 0.0 && config.de_crossover <= 1.0)) {
      throw ConfigurationError("de_crossover must lie in [0, 1]");
    }
  } else {
    if (config.pop_size < 2) throw ConfigurationError("CMA-ES needs pop_size >= 2");
    if (!(config.cma_sigma0 > 0.0)) throw ConfigurationError("cma_sigma0 must be > 0");
  }
}

std::weak_ordering feasibility_first_compare(const Fitness& a, const Fitness& b) {
  const bool fa = a.feasible();
  const bool fb = b.feasible();
  if (fa != fb) return fa ? std::weak_ordering::less : std::weak_ordering::greater;
  const double ka = fa ? a.value : a.violation;
  const double kb = fa ? b.value : b.violation;
  if (ka < kb) return std::weak_ordering::less;
  if (kb < ka) return std::weak_ordering::greater;
  return std::weak_ordering::equivalent;
}

CmaesModel::CmaesModel(const Bounds& bounds, const Vector& mean, double sigma0)
    : bounds_(bounds),
      dim_(static_cast<Eigen::Index>(bounds.size())),
      mean_(bounds.normalize(mean)),
      sigma_(sigma0),
      cov_(Matrix::Identity(dim_, dim_)),
      basis_(Matrix::Identity(dim_, dim_)),
      eigenvalues_(Vector::Ones(dim_)),
      path_sigma_(Vector::Zero(dim_)),
      path_cov_(Vector::Zero(dim_)) {}

std::vector<Vector> CmaesModel::sample(int count, Rng& rng) const {
  const Vector scale = eigenvalues_.cwiseSqrt();
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const Vector z = rng.normal_vector(dim_);
    const Vector unit = mean_ + sigma_ * (basis_ * scale.cwiseProduct(z));
    out.push_back(bounds_.clip(bounds_.denormalize(unit)));
  }
  return out;
}

void CmaesModel::update(const std::vector<Vector>& ranked) {
  const int lambda = static_cast<int>(ranked.size());
  if (lambda < 1) return;
  const int mu = std::max(1, lambda / 2);
  const double n = static_cast<double>(dim_);

  Vector weights(mu);
  for (int i = 0; i < mu; ++i) weights[i] = std::log(mu + 0.5) - std::log(i + 1.0);
  weights /= weights.sum();
  const double mu_eff = 1.0 / weights.squaredNorm();

  const double c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
  const double d_sigma =
      1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (n + 1.0)) - 1.0) + c_sigma;
  const double c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
  const double c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff);
  const double c_mu =
      std::min(1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((n + 2.0) * (n + 2.0) + mu_eff));
  const double chi_n = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  std::vector<Vector> steps;
  steps.reserve(static_cast<std::size_t>(mu));
  Vector step_w = Vector::Zero(dim_);
  for (int i = 0; i < mu; ++i) {
    steps.push_back((bounds_.normalize(ranked[static_cast<std::size_t>(i)]) - mean_) / sigma_);
    step_w += weights[i] * steps.back();
  }
  mean_ += sigma_ * step_w;

  const Vector inv_sqrt = eigenvalues_.cwiseSqrt().cwiseInverse();
  const Vector whitened = basis_ * inv_sqrt.asDiagonal() * basis_.transpose() * step_w;
  path_sigma_ =
      (1.0 - c_sigma) * path_sigma_ + std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff) * whitened;
  ++generation_;
  const double ps_norm = path_sigma_.norm();
  const double decay = 1.0 - std::pow(1.0 - c_sigma, 2.0 * generation_);
  const bool h_sigma = ps_norm / std::sqrt(decay) < (1.4 + 2.0 / (n + 1.0)) * chi_n;
  path_cov_ = (1.0 - c_c) * path_cov_ +
              (h_sigma ? std::sqrt(c_c * (2.0 - c_c) * mu_eff) : 0.0) * step_w;

  Matrix rank_mu = Matrix::Zero(dim_, dim_);
  for (int i = 0; i < mu; ++i) {
    rank_mu += weights[i] * steps[static_cast<std::size_t>(i)] *
               steps[static_cast<std::size_t>(i)].transpose();
  }
  const double h_correction = h_sigma ? 0.0 : c_c * (2.0 - c_c);
  cov_ = (1.0 - c_1 - c_mu) * cov_ +
         c_1 * (path_cov_ * path_cov_.transpose() + h_correction * cov_) + c_mu * rank_mu;
  sigma_ *= std::exp((c_sigma / d_sigma) * (ps_norm / chi_n - 1.0));
  // The box is the unit cube here; a wider step only samples the clip faces.
  sigma_ = std::min(sigma_, 1.0);
  decompose();
}

void CmaesModel::decompose() {
  cov_ = 0.5 * (cov_ + cov_.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov_);
  basis_ = solver.eigenvectors();
  eigenvalues_ = solver.eigenvalues().cwiseMax(kEigenFloor);
  if (solver.info() != Eigen::Success || !eigenvalues_.allFinite()) {
    cov_ = Matrix::Identity(dim_, dim_);
    basis_ = Matrix::Identity(dim_, dim_);
    eigenvalues_ = Vector::Ones(dim_);
    return;
  }
  if ((solver.eigenvalues().array() < kEigenFloor).any()) {
    cov_ = basis_ * eigenvalues_.asDiagonal() * basis_.transpose();
  }
}

std::vector<Vector> de_variation(const std::vector<Vector>& parents, int count,
                                 const OptimizerConfig& config, const Bounds& bounds, Rng& rng) {
  const std::size_t np = parents.size();
  if (np < 4) throw ConfigurationError("DE variation needs at least 4 parents");
  const Eigen::Index dim = parents.front().size();
  std::vector<Vector> trials;
  trials.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const std::size_t target = static_cast<std::size_t>(k) % np;
    std::size_t r[3];
    for (int j = 0; j < 3; ++j) {
      std::size_t pick;
      do {
        pick = rng.index(np);
      } while (pick == target || std::find(r, r + j, pick) != r + j);
      r[j] = pick;
    }
    const Vector mutant = parents[r[0]] + config.de_scale * (parents[r[1]] - parents[r[2]]);
    Vector trial = parents[target];
    const Eigen::Index forced = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(dim)));
    for (Eigen::Index d = 0; d < dim; ++d) {
      if (d == forced || rng.uniform() < config.de_crossover) trial[d] = mutant[d];
    }
    trials.push_back(bounds.clip(std::move(trial)));
  }
  return trials;
}

SearchState init_search(const OptimizerConfig& config, const Bounds& bounds,
                        const Objective& objective) {
  validate(config);
  SearchState state;
  state.config = config;
  state.rng = Rng(config.seed);
  for (int i = 0; i < config.pop_size; ++i) {
    Vector x = state.rng.uniform_in(bounds);
    const Fitness f = objective(x);
    track_best(state, x, f);
    state.population.push_back(std::move(x));
    state.fitness.push_back(f);
  }
  if (config.kind == EngineKind::CMAES) {
    state.cma.emplace(bounds, state.best_x, config.cma_sigma0);
  }
  return state;
}

void step(SearchState& state, const Objective& objective, const Bounds& bounds) {
  const int pop = state.config.pop_size;
  if (state.config.kind == EngineKind::DE) {
    auto trials = de_variation(state.population, pop, state.config, bounds, state.rng);
    for (int i = 0; i < pop; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      const Fitness f = objective(trials[idx]);
      track_best(state, trials[idx], f);
      if (!better(state.fitness[idx], f)) {
        state.population[idx] = std::move(trials[idx]);
        state.fitness[idx] = f;
      }
    }
  } else {
    auto samples = state.cma->sample(pop, state.rng);
    std::vector<Fitness> fitness;
    fitness.reserve(samples.size());
    for (const auto& x : samples) {
      fitness.push_back(objective(x));
      track_best(state, x, fitness.back());
    }
    std::vector<Vector> ranked;
    ranked.reserve(samples.size());
    for (std::size_t i : rank_order(fitness)) ranked.push_back(samples[i]);
    state.cma->update(ranked);
    state.population = std::move(samples);
    state.fitness = std::move(fitness);
  }
  ++state.generation;
}

UpperVariation::UpperVariation(const OptimizerConfig& config, const Bounds& bounds)
    : config_(config), bounds_(bounds) {
  validate(config_);
}

void UpperVariation::initialize(const std::vector<Vector>& parents,
                                const std::vector<Fitness>& fitness) {
  if (config_.kind != EngineKind::CMAES) return;
  const auto order = rank_order(fitness);
  cma_.emplace(bounds_, parents[order.front()], config_.cma_sigma0);
}

std::vector<Vector> UpperVariation::generate(const std::vector<Vector>& parents, int count,
                                             Rng& rng) const {
  if (config_.kind == EngineKind::DE) return de_variation(parents, count, config_, bounds_, rng);
  if (!cma_) throw ContractViolation("UpperVariation::generate before initialize");
  return cma_->sample(count, rng);
}

void UpperVariation::adapt(std::vector<std::pair<Vector, Fitness>> evaluated) {
  if (!cma_ || evaluated.empty()) return;
  std::stable_sort(evaluated.begin(), evaluated.end(),
                   [](const auto& a, const auto& b) { return better(a.second, b.second); });
  std::vector<Vector> ranked;
  ranked.reserve(evaluated.size());
  for (auto& e : evaluated) ranked.push_back(std::move(e.first));
  cma_->update(ranked);
}

}  // namespace crblea
