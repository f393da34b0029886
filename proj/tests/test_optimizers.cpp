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


#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "crblea/optimizers.hpp"

using namespace crblea;

namespace {

Bounds box(int d, double lo, double hi) {
  return Bounds(std::vector<Interval>(static_cast<std::size_t>(d), Interval{lo, hi}));
}

struct Counted {
  std::int64_t calls = 0;
  Objective fn() {
    return [this](const Vector& x) {
      ++calls;
      return Fitness{x.squaredNorm(), 0.0};
    };
  }
};

OptimizerConfig de_config(int pop, std::uint64_t seed) {
  OptimizerConfig c;
  c.kind = EngineKind::DE;
  c.pop_size = pop;
  c.seed = seed;
  return c;
}

OptimizerConfig cma_config(int pop, std::uint64_t seed) {
  OptimizerConfig c;
  c.kind = EngineKind::CMAES;
  c.pop_size = pop;
  c.seed = seed;
  return c;
}

double run_sphere(const OptimizerConfig& cfg, const Bounds& b, int generations) {
  Counted c;
  const Objective f = c.fn();
  SearchState s = init_search(cfg, b, f);
  for (int g = 0; g < generations; ++g) step(s, f, b);
  return s.best.value;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

}  // namespace

TEST_CASE("feasibility-first comparison") {
  CHECK(better(Fitness{5.0, 0.0}, Fitness{1.0, 2.0}));
  CHECK(better(Fitness{1.0, 0.0}, Fitness{2.0, 0.0}));
  CHECK(better(Fitness{9.0, 1.0}, Fitness{9.0, 3.0}));
  CHECK_FALSE(better(Fitness{1.0, 2.0}, Fitness{5.0, 0.0}));
  CHECK(feasibility_first_compare(Fitness{3.0, 0.0}, Fitness{3.0, 0.0}) == 0);
  // Among infeasibles the objective does not matter.
  CHECK(better(Fitness{100.0, 0.5}, Fitness{-100.0, 0.6}));
}

TEST_CASE("initial population respects bounds and is reproducible") {
  const Bounds b = box(1, 0.0, 1.0);
  Counted c;
  const SearchState s = init_search(de_config(5, 3), b, c.fn());
  REQUIRE(s.population.size() == 5);
  for (const auto& x : s.population) CHECK(b.contains(x));
  CHECK(c.calls == 5);

  Counted c2;
  const SearchState s2 = init_search(de_config(5, 3), b, c2.fn());
  for (std::size_t i = 0; i < 5; ++i) CHECK(s.population[i] == s2.population[i]);

  const Bounds b3 = box(3, -5.0, 10.0);
  Counted c3;
  const SearchState cs = init_search(cma_config(7, 9), b3, c3.fn());
  const double worst = std::max_element(
      cs.fitness.begin(), cs.fitness.end(),
      [](const Fitness& a, const Fitness& z) { return a.value < z.value; })->value;
  CHECK(cs.best.value <= worst);
}

TEST_CASE("configuration errors") {
  Counted c;
  CHECK_THROWS_AS(init_search(de_config(3, 1), box(2, 0, 1), c.fn()), ConfigurationError);
  OptimizerConfig bad = de_config(5, 1);
  bad.de_scale = 0.0;
  CHECK_THROWS_AS(validate(bad), ConfigurationError);
  bad = de_config(5, 1);
  bad.de_crossover = 1.5;
  CHECK_THROWS_AS(validate(bad), ConfigurationError);
  bad = cma_config(5, 1);
  bad.cma_sigma0 = -1.0;
  CHECK_THROWS_AS(validate(bad), ConfigurationError);
  CHECK_THROWS_AS(engine_from_string("pso"), ConfigurationError);
}

TEST_CASE("objective calls are exact and candidates stay in bounds") {
  const Bounds b = box(3, -5.0, 10.0);
  for (const auto& cfg : {de_config(6, 4), cma_config(6, 4)}) {
    Counted c;
    const Objective f = c.fn();
    SearchState s = init_search(cfg, b, f);
    for (int g = 0; g < 17; ++g) {
      step(s, f, b);
      for (const auto& x : s.population) CHECK(b.contains(x));
    }
    CHECK(c.calls == 6 + 17 * 6);
    CHECK(s.evaluations == c.calls);
  }
}

TEST_CASE("best-so-far never worsens") {
  const Bounds b = box(3, -5.0, 10.0);
  for (const auto& cfg : {de_config(5, 8), cma_config(5, 8)}) {
    Counted c;
    const Objective f = c.fn();
    SearchState s = init_search(cfg, b, f);
    double prev = s.best.value;
    for (int g = 0; g < 60; ++g) {
      step(s, f, b);
      CHECK(s.best.value <= prev);
      prev = s.best.value;
    }
  }
}

TEST_CASE("identical seeds give identical trajectories") {
  const Bounds b = box(3, -5.0, 10.0);
  for (const auto& cfg : {de_config(5, 21), cma_config(5, 21)}) {
    Counted c1, c2;
    const Objective f1 = c1.fn(), f2 = c2.fn();
    SearchState s1 = init_search(cfg, b, f1);
    SearchState s2 = init_search(cfg, b, f2);
    for (int g = 0; g < 30; ++g) {
      step(s1, f1, b);
      step(s2, f2, b);
      CHECK(s1.best.value == s2.best.value);
    }
    CHECK(s1.best_x == s2.best_x);
  }
}

TEST_CASE("CMA-ES reaches 1e-6 on the 3-D sphere in 50 generations") {
  // pycma (default active CMA, popsize 7, same box and sigma0) ends 50
  // iterations at median 7.5e-7 with 56 of 100 seeds at or below 1e-6.
  const Bounds b = box(3, -5.0, 10.0);
  std::vector<double> best;
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    best.push_back(run_sphere(cma_config(7, seed), b, 50));  // 4 + floor(3 ln 3)
    if (best.back() <= 1e-6) ++hits;
  }
  CHECK(median(best) <= 1e-6);
  CHECK(hits >= 56);
  CHECK(*std::max_element(best.begin(), best.end()) <= 1e-3);
}

TEST_CASE("CMA-ES covariance stays symmetric positive definite") {
  const Bounds b = box(3, -5.0, 10.0);
  Counted c;
  const Objective f = c.fn();
  SearchState s = init_search(cma_config(7, 5), b, f);
  for (int g = 0; g < 120; ++g) {
    step(s, f, b);
    REQUIRE(s.cma.has_value());
    const Matrix& C = s.cma->covariance();
    CHECK((C - C.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * C.cwiseAbs().maxCoeff());
    CHECK(s.cma->smallest_eigenvalue() > 0.0);
  }
}

TEST_CASE("DE on the 3-D sphere matches an independent reference DE") {
  // Figures for DE/rand/1/bin (F = 0.5, CR = 0.9) on [-5, 10]^3 after 50
  // generations, measured over 100 seeds with a separate implementation:
  // pop 7 gives median best 0.53 and reaches 1e-3 in 6 of 100 runs; pop 10
  // gives median 2.2e-3 and 44 of 100.
  const Bounds b = box(3, -5.0, 10.0);
  for (const auto& [pop, ref_median, ref_hits] :
       std::vector<std::tuple<int, double, int>>{{7, 0.53, 6}, {10, 2.2e-3, 44}}) {
    CAPTURE(pop);
    std::vector<double> best;
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      best.push_back(run_sphere(de_config(pop, seed), b, 50));
      if (best.back() <= 1e-3) ++hits;
    }
    CHECK(median(best) <= ref_median);
    CHECK(hits >= ref_hits);
  }
}

TEST_CASE("constant objective leaves the best unchanged") {
  const Bounds b = box(2, -1.0, 1.0);
  const Objective f = [](const Vector&) { return Fitness{4.0, 0.0}; };
  for (const auto& cfg : {de_config(5, 2), cma_config(5, 2)}) {
    SearchState s = init_search(cfg, b, f);
    for (int g = 0; g < 10; ++g) {
      step(s, f, b);
      CHECK(s.best.value == 4.0);
    }
  }
}

TEST_CASE("non-finite objective propagates") {
  const Bounds b = box(2, -1.0, 1.0);
  int calls = 0;
  const Objective f = [&](const Vector& x) {
    if (++calls > 7) throw EvaluationError("nan", x, x);
    return Fitness{x.squaredNorm(), 0.0};
  };
  SearchState s = init_search(de_config(5, 2), b, f);
  CHECK_THROWS_AS(step(s, f, b), EvaluationError);
}
