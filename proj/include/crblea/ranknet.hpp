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

// Contrastive ranking network.
//
// One subnet maps a normalized upper-level vector x (m) to a scalar score S:
//
//   h0 = act(W_psi x + b_psi)            n units, stands in for x -> x_l*
//   z  = [x; h0]                         m + n
//   h1 = relu(W1 z + b1)                 q
//   h2 = relu(W2 h1 + b2)                q
//   S  = w3 . h2 + b3
//
// A pair (x_i, x_j) is compared with both branches sharing these parameters:
// y = sigmoid(S_i - S_j) estimates P(x_i is better). Scoring against a fixed
// reference with S_ref = 0 gives r(x) = sigmoid(S(x)).

#ifndef CRBLEA_RANKNET_HPP_
#define CRBLEA_RANKNET_HPP_

#include <optional>
#include <span>
#include <vector>

#include "crblea/common.hpp"
#include "crblea/nested.hpp"

namespace crblea {

struct AdamState {
  Vector first;
  Vector second;
  int steps = 0;
};

struct RankNetParams {
  int m = 0;
  int n = 0;
  int q = 0;
  bool psi_relu = true;

  Matrix psi_w;  // n x m
  Vector psi_b;  // n
  Matrix w1;     // q x (m + n)
  Vector b1;
  Matrix w2;     // q x q
  Vector b2;
  Vector w3;     // q
  double b3 = 0.0;

  AdamState adam;
  int generation_id = 0;

  std::size_t parameter_count() const;
  // Flat layout: psi_w, psi_b, w1, b1, w2, b2, w3, b3 (matrices column-major).
  Vector flatten() const;
  void assign(const Vector& flat);
};

// All weights and biases zero.
RankNetParams zero_network(int m, int n, int q, bool psi_relu = true);
// Glorot-uniform weights, zero biases.
RankNetParams random_network(int m, int n, int q, Rng& rng, bool psi_relu = true);

double subnet_forward(const RankNetParams& params, const Vector& x);
double pair_forward(const RankNetParams& params, const Vector& x_i, const Vector& x_j);
double ranking_score(const RankNetParams& params, const Vector& x);

double sigmoid(double t);

// Ordered pair over the dataset's normalized points.
struct PairSample {
  std::size_t first = 0;
  std::size_t second = 0;
  double label = 0.5;  // 1: first is better, 0: second is better, 0.5: tie
};

struct PairDataset {
  std::vector<Vector> points;  // normalized x_u of the source pool
  std::vector<PairSample> samples;
  std::size_t source_pool_size = 0;

  const Vector& x_first(const PairSample& s) const { return points[s.first]; }
  const Vector& x_second(const PairSample& s) const { return points[s.second]; }
};

// Both orderings of every unordered pair: N (N - 1) samples. Inputs are
// min-max normalized with `upper_bounds`.
PairDataset pdp(std::span<const UpperIndividual> pool, const Bounds& upper_bounds);

// Mean binary cross-entropy and its gradient in flatten() order.
struct LossGradient {
  double loss = 0.0;
  Vector gradient;
};
LossGradient loss_and_gradient(const RankNetParams& params, const PairDataset& dataset);
double mean_loss(const RankNetParams& params, const PairDataset& dataset);

struct TrainOptions {
  int epochs = 200;
  double lr = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double early_stop_delta = 1e-5;
  int early_stop_window = 20;
};

struct TrainResult {
  RankNetParams params;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  int epochs_run = 0;
};

// Full-batch Adam on the mean BCE. Increments generation_id. Throws
// TrainingDivergence on a non-finite loss.
TrainResult train(RankNetParams params, const PairDataset& dataset, const TrainOptions& options);

// Smallest N >= 2 with N (N - 1) >= 10 P.
std::size_t pool_trigger_size(std::size_t parameter_count);
std::size_t pool_trigger_size(const RankNetParams& params);

// Fraction of non-tie samples ranked correctly; absent for all-tie data.
std::optional<double> model_accuracy(const RankNetParams& params, const PairDataset& dataset);

}  // namespace crblea

#endif  // CRBLEA_RANKNET_HPP_
