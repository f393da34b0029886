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


#include <vector>

#include <doctest.h>

#include "crblea/crframework.hpp"

using namespace crblea;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

UpperIndividual member(const Vector& x, double F) {
  UpperIndividual ind(x);
  ind.resolve(Vector::Zero(1), 0.0, F, 0.0);
  return ind;
}

const Bounds kUnit(std::vector<Interval>{{0.0, 1.0}});

// S(x) = x on [0, 1]: larger x ranks higher.
RankNetParams increasing_net() {
  RankNetParams p = zero_network(1, 1, 1);
  p.w1(0, 0) = 1.0;
  p.w2(0, 0) = 1.0;
  p.w3[0] = 1.0;
  p.generation_id = 1;
  return p;
}

// Hands out the given x values in order, one call per batch.
struct ScriptedSource {
  std::vector<std::vector<double>> batches;
  int calls = 0;
  OffspringSource fn() {
    return [this](int count) {
      std::vector<UpperIndividual> out;
      const auto& b = batches.at(static_cast<std::size_t>(calls++));
      for (int i = 0; i < count; ++i) out.emplace_back(vec({b.at(static_cast<std::size_t>(i))}));
      return out;
    };
  }
};

}  // namespace

TEST_CASE("pgr keeps the top half rounded up") {
  CHECK(gated_count(5) == 3);
  CHECK(gated_count(4) == 2);
  CHECK(gated_count(1) == 1);
  const RankNetParams net = increasing_net();
  std::vector<UpperIndividual> parents{member(vec({0.1}), 1.0), member(vec({0.2}), 2.0)};
  ScriptedSource src{{{0.5, 0.9, 0.3, 0.7, 0.6}}};
  const PgrResult r = pgr(net, parents, src.fn(), 5, kUnit);
  REQUIRE(r.selected.size() == 3);
  CHECK(r.selected[0].x_u()[0] == 0.9);
  CHECK(r.selected[1].x_u()[0] == 0.7);
  CHECK(r.selected[2].x_u()[0] == 0.6);
  CHECK_FALSE(r.resampled);
  CHECK(src.calls == 1);
  for (const auto& ind : r.selected) CHECK_FALSE(ind.resolved());
  for (const auto& ind : parents) CHECK(ind.rank_generation() == 1);
}

TEST_CASE("pgr resamples once when offspring trail the parents") {
  const RankNetParams net = increasing_net();
  std::vector<UpperIndividual> parents{member(vec({0.95}), 1.0), member(vec({0.2}), 2.0)};
  ScriptedSource src{{{0.1, 0.2, 0.3, 0.4, 0.5}, {0.15, 0.8, 0.05, 0.45, 0.35}}};
  const PgrResult r = pgr(net, parents, src.fn(), 5, kUnit);
  CHECK(r.resampled);
  CHECK(src.calls == 2);  // still below 0.95 after the resample: no third draw
  REQUIRE(r.selected.size() == 3);
  CHECK(r.selected[0].x_u()[0] == 0.8);
  CHECK(r.selected[1].x_u()[0] == 0.5);
  CHECK(r.selected[2].x_u()[0] == 0.45);

  ScriptedSource again{{{0.1, 0.2, 0.3, 0.4, 0.5}}};
  const PgrResult no = pgr(net, parents, again.fn(), 5, kUnit, false);
  CHECK_FALSE(no.resampled);
  CHECK(again.calls == 1);
  CHECK(no.selected[0].x_u()[0] == 0.5);
}

TEST_CASE("solution pool") {
  SolutionPool pool(3);
  CHECK_FALSE(pool.ready());
  pool.add(member(vec({0.1}), 1.0));
  pool.add({member(vec({0.2}), 2.0), member(vec({0.3}), 3.0)});
  CHECK(pool.ready());
  CHECK_THROWS_AS(pool.add(UpperIndividual(vec({0.4}))), ContractViolation);
  pool.clear();
  CHECK(pool.size() == 0);
}

TEST_CASE("retraining fires exactly at the trigger") {
  Rng rng(1);
  NetConfig net;
  const int q = 8;
  RankNetParams params = random_network(1, 1, q, rng);
  const std::size_t Np = pool_trigger_size(params);
  SolutionPool pool(Np);
  Bounds frame = kUnit;
  auto fresh = [&] { return random_network(1, 1, q, rng); };

  for (std::size_t i = 0; i + 1 < Np; ++i) pool.add(member(vec({rng.uniform()}), rng.uniform()));
  const RankNetParams before = params;
  const RetrainOutcome idle = maybe_retrain(pool, params, frame, kUnit, net, fresh);
  CHECK_FALSE(idle.attempted);
  CHECK(params.flatten() == before.flatten());
  CHECK(pool.size() == Np - 1);

  auto F = [](double x) { return (x - 0.3) * (x - 0.3); };
  pool.clear();
  for (std::size_t i = 0; i < Np; ++i) {
    const double x = rng.uniform();
    pool.add(member(vec({x}), F(x)));
  }
  const RetrainOutcome first = maybe_retrain(pool, params, frame, kUnit, net, fresh);
  CHECK(first.attempted);
  CHECK(first.trained);
  CHECK_FALSE(first.old_accuracy.has_value());
  CHECK(pool.size() == 0);
  CHECK(params.generation_id == 1);

  for (std::size_t i = 0; i < Np; ++i) {
    const double x = rng.uniform();
    pool.add(member(vec({x}), F(x)));
  }
  const RetrainOutcome second = maybe_retrain(pool, params, frame, kUnit, net, fresh);
  CHECK(second.old_accuracy.has_value());
  CHECK(params.generation_id == 2);
  CHECK(pool.size() == 0);
}

TEST_CASE("pool frame spans the pool") {
  const Bounds wide(std::vector<Interval>{{-5.0, 10.0}, {0.0, 1.0}});
  const std::vector<UpperIndividual> pool{member(vec({1.0, 0.5}), 0.0),
                                          member(vec({3.0, 0.5}), 0.0)};
  const Bounds f = pool_frame(pool, wide);
  CHECK(f[0].low == 1.0);
  CHECK(f[0].high == 3.0);
  CHECK(f[1].low == 0.5);
  CHECK(f[1].width() == doctest::Approx(1e-9));
}

TEST_CASE("ranking-gated generations halve the lower-level searches") {
  const ProblemSpec p = make_smd(1, 2, 3);
  HarnessConfig cfg;
  cfg.mode = Mode::CR;
  cfg.termination.fes_u_max = 700;
  cfg.termination.fes_u_var_window = 10000;
  const RunRecord r = run_cr_blea(p, cfg, 3);
  const int N_u = r.upper_pop;
  bool seen_allocated = false;
  std::int64_t prev_fes_u = 0;
  for (std::size_t g = 0; g < r.generations.size(); ++g) {
    const auto& s = r.generations[g];
    if (g == 0) {
      CHECK(s.lower_searches == N_u);
    } else if (s.allocated) {
      seen_allocated = true;
      CHECK(s.lower_searches <= gated_count(N_u));
    } else {
      CHECK_FALSE(seen_allocated);  // warm-up only comes first
      CHECK(s.lower_searches == N_u);
    }
    CHECK(s.fes_u - prev_fes_u == s.lower_searches);
    prev_fes_u = s.fes_u;
  }
  CHECK(seen_allocated);
  CHECK(r.trainings_done >= 1);
  CHECK(r.pool_trigger == 76);
  CHECK(r.fes_u <= 700);
  CHECK(r.fes_t == r.fes_u + r.fes_l);
}

TEST_CASE("warm-up matches the nested run of the same seed") {
  const ProblemSpec p = make_smd(2, 2, 3);
  HarnessConfig cfg;
  cfg.termination.fes_u_max = 60;
  cfg.termination.fes_u_var_window = 10000;
  const RunRecord nested = run_nested_blea(p, cfg, 5);
  cfg.mode = Mode::CR;
  const RunRecord cr = run_cr_blea(p, cfg, 5);
  // 60 upper FEs stay below the 76-member trigger, so no gate ever closes.
  CHECK(cr.trainings_done == 0);
  CHECK(cr.best_F == nested.best_F);
  CHECK(cr.fes_t == nested.fes_t);
}

TEST_CASE("ablation modes") {
  const ProblemSpec p = make_smd(1, 2, 3);
  HarnessConfig cfg;
  cfg.termination.fes_u_max = 400;
  cfg.termination.fes_u_var_window = 10000;
  cfg.mode = Mode::CRNoNet;
  const RunRecord no_net = run_cr_blea(p, cfg, 2);
  CHECK(no_net.trainings_done == 0);
  CHECK(no_net.model_acc_history.empty());
  for (const auto& s : no_net.generations) {
    if (s.allocated) CHECK(s.lower_searches <= gated_count(no_net.upper_pop));
  }
  cfg.mode = Mode::CRNoResample;
  const RunRecord no_rs = run_cr_blea(p, cfg, 2);
  for (const auto& s : no_rs.generations) CHECK_FALSE(s.resampled);
  cfg.mode = Mode::Nested;
  CHECK_THROWS_AS(run_cr_blea(p, cfg, 2), ConfigurationError);
}
