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

// Ranking-gated bilevel loop. After a warm-up that runs the plain nested
// generation, a trained ranking network picks which half of each offspring
// batch is worth a lower-level search.

#ifndef CRBLEA_CRFRAMEWORK_HPP_
#define CRBLEA_CRFRAMEWORK_HPP_

#include <functional>
#include <optional>
#include <vector>

#include "crblea/nested.hpp"
#include "crblea/ranknet.hpp"

namespace crblea {

class SolutionPool {
 public:
  explicit SolutionPool(std::size_t capacity_trigger) : trigger_(capacity_trigger) {}

  // Every added member must carry an upper evaluation.
  void add(const UpperIndividual& ind);
  void add(const std::vector<UpperIndividual>& inds);
  void clear() { entries_.clear(); }
  bool ready() const { return entries_.size() >= trigger_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity_trigger() const { return trigger_; }
  const std::vector<UpperIndividual>& entries() const { return entries_; }

 private:
  std::size_t trigger_;
  std::vector<UpperIndividual> entries_;
};

enum class CrFlag { WarmUp, Allocated };

class CrPhase {
 public:
  CrFlag flag() const { return flag_; }
  int trainings_done() const { return trainings_; }
  void mark_allocated() { flag_ = CrFlag::Allocated; }
  void count_training() { ++trainings_; }

 private:
  CrFlag flag_ = CrFlag::WarmUp;
  int trainings_ = 0;
};

struct RetrainOutcome {
  bool attempted = false;
  bool trained = false;
  std::optional<double> old_accuracy;
  double final_loss = 0.0;
};

TrainOptions train_options(const NetConfig& net);

// Bounding box of the pool members' x_u, each side at least a tiny fraction
// of the corresponding upper-bound width.
Bounds pool_frame(const std::vector<UpperIndividual>& pool, const Bounds& upper_bounds);

// When the pool has reached its trigger: scores the OLD network (in its own
// input frame) on the new pairs, skipped for a never-trained network; then
// trains and clears the pool. `frame` is the input scaling of `params` and is
// replaced along with it. A diverged training keeps the previous parameters
// and frame. `fresh` supplies the starting point under the fresh-init policy.
RetrainOutcome maybe_retrain(SolutionPool& pool, RankNetParams& params, Bounds& frame,
                             const Bounds& upper_bounds, const NetConfig& net,
                             const std::function<RankNetParams()>& fresh);

using OffspringSource = std::function<std::vector<UpperIndividual>(int)>;

struct PgrResult {
  std::vector<UpperIndividual> selected;
  bool resampled = false;
};

// Keeps the ceil(N_u / 2) best-scored of N_u proposals. If the best kept score
// is below the best parent score, one extra batch is drawn and the top half of
// the union is kept. Parent scores are (re)computed when they stem from
// another network generation. `frame` scales x_u into network inputs.
PgrResult pgr(const RankNetParams& params, std::vector<UpperIndividual>& parents,
              const OffspringSource& variation, int N_u, const Bounds& frame,
              bool allow_resample = true);

int gated_count(int N_u);

RunRecord run_cr_blea(const ProblemSpec& p, const HarnessConfig& cfg, std::uint64_t seed);

// Dispatches on cfg.mode.
RunRecord run_mode(const ProblemSpec& p, const HarnessConfig& cfg, std::uint64_t seed);

}  // namespace crblea

#endif  // CRBLEA_CRFRAMEWORK_HPP_
