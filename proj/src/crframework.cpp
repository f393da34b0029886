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

#include "crblea/crframework.hpp"

#include <algorithm>
#include <iostream>
#include <numeric>

namespace crblea {

namespace {

// Network initialisation draws from its own stream so that the upper-level
// stream stays aligned with a nested run of the same seed during warm-up.
constexpr std::uint64_t kNetworkStream = 0x9e3779b97f4a7c15ULL;

void score_all(const RankNetParams& params, std::vector<UpperIndividual>& inds,
               const Bounds& upper_bounds) {
  for (auto& ind : inds) {
    ind.set_rank(ranking_score(params, upper_bounds.normalize(ind.x_u())), params.generation_id);
  }
}

double best_score(const std::vector<UpperIndividual>& inds) {
  double best = -1.0;
  for (const auto& ind : inds) best = std::max(best, *ind.rank_score());
  return best;
}

// Descending score; equal scores keep proposal order.
void keep_top(std::vector<UpperIndividual>& inds, std::size_t count) {
  std::stable_sort(inds.begin(), inds.end(), [](const UpperIndividual& a, const UpperIndividual& b) {
    return *a.rank_score() > *b.rank_score();
  });
  if (inds.size() > count) inds.erase(inds.begin() + static_cast<std::ptrdiff_t>(count), inds.end());
}

}  // namespace

void SolutionPool::add(const UpperIndividual& ind) {
  if (!ind.resolved()) throw ContractViolation("solution pool: member without upper evaluation");
  entries_.push_back(ind);
}

void SolutionPool::add(const std::vector<UpperIndividual>& inds) {
  for (const auto& ind : inds) add(ind);
}

TrainOptions train_options(const NetConfig& net) {
  TrainOptions o;
  o.epochs = net.epochs;
  o.lr = net.lr;
  o.early_stop_delta = net.early_stop_delta;
  o.early_stop_window = net.early_stop_window;
  return o;
}

Bounds pool_frame(const std::vector<UpperIndividual>& pool, const Bounds& upper_bounds) {
  if (pool.empty()) throw ContractViolation("pool frame: empty pool");
  Vector lo = pool.front().x_u();
  Vector hi = lo;
  for (const auto& ind : pool) {
    lo = lo.cwiseMin(ind.x_u());
    hi = hi.cwiseMax(ind.x_u());
  }
  const Vector widths = upper_bounds.widths();
  std::vector<Interval> sides;
  for (Eigen::Index d = 0; d < lo.size(); ++d) {
    const double min_width = 1e-9 * widths[d];
    const double width = std::max(hi[d] - lo[d], min_width);
    sides.push_back({lo[d], lo[d] + width});
  }
  return Bounds(std::move(sides));
}

RetrainOutcome maybe_retrain(SolutionPool& pool, RankNetParams& params, Bounds& frame,
                             const Bounds& upper_bounds, const NetConfig& net,
                             const std::function<RankNetParams()>& fresh) {
  RetrainOutcome out;
  if (!pool.ready()) return out;
  out.attempted = true;
  if (params.generation_id > 0) {
    out.old_accuracy = model_accuracy(params, pdp(pool.entries(), frame));
  }
  const Bounds next_frame =
      net.frame == InputFrame::Pool ? pool_frame(pool.entries(), upper_bounds) : upper_bounds;
  const PairDataset data = pdp(pool.entries(), next_frame);

  RankNetParams start = params;
  if (net.init == InitMode::Fresh) {
    start = fresh();
    start.generation_id = params.generation_id;
  }
  try {
    TrainResult r = train(std::move(start), data, train_options(net));
    params = std::move(r.params);
    frame = next_frame;
    out.trained = true;
    out.final_loss = r.final_loss;
  } catch (const TrainingDivergence& e) {
    std::cerr << "warning: " << e.what() << "; keeping network generation "
              << params.generation_id << "\n";
  }
  pool.clear();
  return out;
}

int gated_count(int N_u) { return (N_u + 1) / 2; }

PgrResult pgr(const RankNetParams& params, std::vector<UpperIndividual>& parents,
              const OffspringSource& variation, int N_u, const Bounds& frame,
              bool allow_resample) {
  if (N_u < 1) throw ContractViolation("pgr: N_u must be >= 1");
  for (const auto& ind : parents) {
    if (ind.rank_generation() != params.generation_id) {
      score_all(params, parents, frame);
      break;
    }
  }
  const auto keep = static_cast<std::size_t>(gated_count(N_u));
  PgrResult out;
  out.selected = variation(N_u);
  score_all(params, out.selected, frame);
  keep_top(out.selected, keep);
  if (allow_resample && !parents.empty() && !out.selected.empty() &&
      best_score(out.selected) < best_score(parents)) {
    std::vector<UpperIndividual> extra = variation(N_u);
    score_all(params, extra, frame);
    // Union Q_u and R_u: the discarded half of Q_u cannot make the top half
    // of the union ahead of the kept half, so the kept half suffices.
    out.selected.insert(out.selected.end(), extra.begin(), extra.end());
    keep_top(out.selected, keep);
    out.resampled = true;
  }
  return out;
}

RunRecord run_cr_blea(const ProblemSpec& p, const HarnessConfig& cfg, std::uint64_t seed) {
  if (cfg.mode == Mode::Nested) throw ConfigurationError("mode: run_cr_blea needs a CR mode");
  BilevelSession session(p, cfg, seed);
  const int N_u = session.upper_pop();
  const int q = effective_width(cfg);
  Rng net_rng(seed ^ kNetworkStream);
  auto fresh = [&] { return random_network(p.m, p.n, q, net_rng, cfg.net.psi_relu); };
  RankNetParams params = fresh();
  Bounds frame = p.upper_bounds;
  SolutionPool pool(pool_trigger_size(params));
  CrPhase phase;
  std::vector<double> accuracy_history;
  std::vector<double> losses;
  int failures = 0;

  session.initialize();
  pool.add(session.population());

  StopReason reason;
  while ((reason = session.stop_reason()) == StopReason::Continue) {
    if (phase.flag() == CrFlag::WarmUp && !pool.ready()) {
      auto offspring = session.propose(N_u);
      session.absorb(offspring, GenerationStats{});
      pool.add(offspring);
      continue;
    }
    if (pool.ready()) {
      if (cfg.mode == Mode::CRNoNet) {
        pool.clear();
      } else {
        const RetrainOutcome r = maybe_retrain(pool, params, frame, p.upper_bounds, cfg.net, fresh);
        if (r.old_accuracy) accuracy_history.push_back(*r.old_accuracy);
        if (r.trained) {
          phase.count_training();
          losses.push_back(r.final_loss);
          score_all(params, session.population(), frame);
        } else {
          ++failures;
        }
      }
      phase.mark_allocated();
    }

    GenerationStats stats;
    stats.allocated = true;
    std::vector<UpperIndividual> chosen;
    if (cfg.mode == Mode::CRNoNet) {
      chosen = session.propose(N_u, false);
      std::vector<std::size_t> order(chosen.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[session.rng().index(i)]);
      }
      std::vector<UpperIndividual> picked;
      for (std::size_t i = 0; i < static_cast<std::size_t>(gated_count(N_u)) && i < order.size(); ++i) {
        picked.push_back(chosen[order[i]]);
      }
      chosen = std::move(picked);
    } else {
      const OffspringSource source = [&](int k) { return session.propose(k, false); };
      PgrResult g = pgr(params, session.population(), source, N_u, frame,
                        cfg.mode != Mode::CRNoResample);
      stats.resampled = g.resampled;
      chosen = std::move(g.selected);
    }
    const auto budget = static_cast<std::size_t>(std::max<std::int64_t>(0, session.remaining_upper_budget()));
    if (chosen.size() > budget) chosen.resize(budget, chosen.front());
    session.absorb(chosen, stats);
    pool.add(chosen);
  }

  RunRecord record = session.finish(reason);
  record.model_acc_history = std::move(accuracy_history);
  record.training_loss = std::move(losses);
  record.trainings_done = phase.trainings_done();
  record.training_failures = failures;
  record.pool_trigger = static_cast<int>(pool.capacity_trigger());
  return record;
}

RunRecord run_mode(const ProblemSpec& p, const HarnessConfig& cfg, std::uint64_t seed) {
  if (cfg.mode == Mode::Nested) return run_nested_blea(p, cfg, seed);
  return run_cr_blea(p, cfg, seed);
}

}  // namespace crblea
