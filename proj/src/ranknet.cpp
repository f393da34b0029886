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

#include "crblea/ranknet.hpp"

#include <cmath>

namespace crblea {

namespace {

using Array = Eigen::ArrayXXd;

Matrix glorot(int rows, int cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / (rows + cols));
  Matrix w(rows, cols);
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = rng.uniform(-limit, limit);
  }
  return w;
}

double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

// Column-batched forward pass with the activations needed for backprop.
struct Activations {
  Matrix pre0, h0, z, pre1, h1, pre2, h2;
  Vector scores;
};

Matrix relu(const Matrix& a) { return a.cwiseMax(0.0); }

Matrix relu_mask(const Matrix& a) { return (a.array() > 0.0).cast<double>().matrix(); }

Activations forward_batch(const RankNetParams& p, const Matrix& x) {
  Activations a;
  a.pre0 = (p.psi_w * x).colwise() + p.psi_b;
  a.h0 = p.psi_relu ? relu(a.pre0) : a.pre0;
  a.z.resize(p.m + p.n, x.cols());
  a.z.topRows(p.m) = x;
  a.z.bottomRows(p.n) = a.h0;
  a.pre1 = (p.w1 * a.z).colwise() + p.b1;
  a.h1 = relu(a.pre1);
  a.pre2 = (p.w2 * a.h1).colwise() + p.b2;
  a.h2 = relu(a.pre2);
  a.scores = (p.w3.transpose() * a.h2).transpose();
  a.scores.array() += p.b3;
  return a;
}

Matrix stack(const std::vector<Vector>& points, int dim) {
  Matrix x(dim, static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) x.col(static_cast<Eigen::Index>(i)) = points[i];
  return x;
}

void check_input(const RankNetParams& p, const Vector& x) {
  if (x.size() != p.m) throw ContractViolation("ranking network: input dimension mismatch");
}

struct LossParts {
  double loss = 0.0;
  Vector upstream;  // dL/dS per point
};

LossParts pair_loss(const Vector& scores, const PairDataset& dataset) {
  LossParts out;
  out.upstream = Vector::Zero(scores.size());
  const double inv = 1.0 / static_cast<double>(dataset.samples.size());
  for (const auto& s : dataset.samples) {
    const double d = scores[static_cast<Eigen::Index>(s.first)] -
                     scores[static_cast<Eigen::Index>(s.second)];
    out.loss += (softplus(d) - s.label * d) * inv;
    const double g = (sigmoid(d) - s.label) * inv;
    out.upstream[static_cast<Eigen::Index>(s.first)] += g;
    out.upstream[static_cast<Eigen::Index>(s.second)] -= g;
  }
  return out;
}

}  // namespace

std::size_t RankNetParams::parameter_count() const {
  const auto mm = static_cast<std::size_t>(m);
  const auto nn = static_cast<std::size_t>(n);
  const auto qq = static_cast<std::size_t>(q);
  return nn * mm + nn + qq * (mm + nn) + qq + qq * qq + qq + qq + 1;
}

Vector RankNetParams::flatten() const {
  Vector flat(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index at = 0;
  auto put = [&](const auto& block) {
    flat.segment(at, block.size()) = Eigen::Map<const Vector>(block.data(), block.size());
    at += block.size();
  };
  put(psi_w);
  put(psi_b);
  put(w1);
  put(b1);
  put(w2);
  put(b2);
  put(w3);
  flat[at] = b3;
  return flat;
}

void RankNetParams::assign(const Vector& flat) {
  if (flat.size() != static_cast<Eigen::Index>(parameter_count())) {
    throw ContractViolation("ranking network: parameter vector has the wrong length");
  }
  Eigen::Index at = 0;
  auto take = [&](auto& block) {
    Eigen::Map<Vector>(block.data(), block.size()) = flat.segment(at, block.size());
    at += block.size();
  };
  take(psi_w);
  take(psi_b);
  take(w1);
  take(b1);
  take(w2);
  take(b2);
  take(w3);
  b3 = flat[at];
}

RankNetParams zero_network(int m, int n, int q, bool psi_relu) {
  if (m < 1 || n < 1 || q < 1) throw ContractViolation("ranking network: dimensions must be >= 1");
  RankNetParams p;
  p.m = m;
  p.n = n;
  p.q = q;
  p.psi_relu = psi_relu;
  p.psi_w = Matrix::Zero(n, m);
  p.psi_b = Vector::Zero(n);
  p.w1 = Matrix::Zero(q, m + n);
  p.b1 = Vector::Zero(q);
  p.w2 = Matrix::Zero(q, q);
  p.b2 = Vector::Zero(q);
  p.w3 = Vector::Zero(q);
  p.b3 = 0.0;
  const auto count = static_cast<Eigen::Index>(p.parameter_count());
  p.adam = {Vector::Zero(count), Vector::Zero(count), 0};
  return p;
}

RankNetParams random_network(int m, int n, int q, Rng& rng, bool psi_relu) {
  RankNetParams p = zero_network(m, n, q, psi_relu);
  p.psi_w = glorot(n, m, rng);
  p.w1 = glorot(q, m + n, rng);
  p.w2 = glorot(q, q, rng);
  p.w3 = glorot(q, 1, rng).col(0);
  return p;
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double subnet_forward(const RankNetParams& params, const Vector& x) {
  check_input(params, x);
  const Matrix col = x;
  return forward_batch(params, col).scores[0];
}

double pair_forward(const RankNetParams& params, const Vector& x_i, const Vector& x_j) {
  return sigmoid(subnet_forward(params, x_i) - subnet_forward(params, x_j));
}

double ranking_score(const RankNetParams& params, const Vector& x) {
  return sigmoid(subnet_forward(params, x) - 0.0);
}

PairDataset pdp(std::span<const UpperIndividual> pool, const Bounds& upper_bounds) {
  if (pool.size() < 2) throw ContractViolation("pdp: pool needs at least two members");
  PairDataset d;
  d.source_pool_size = pool.size();
  std::vector<double> F;
  for (const auto& ind : pool) {
    if (!ind.resolved()) throw ContractViolation("pdp: pool member without upper evaluation");
    d.points.push_back(upper_bounds.normalize(ind.x_u()));
    F.push_back(*ind.F());
  }
  d.samples.reserve(pool.size() * (pool.size() - 1));
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double diff = F[j] - F[i];
      const double l = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
      d.samples.push_back({i, j, (l + 1.0) / 2.0});
      d.samples.push_back({j, i, (-l + 1.0) / 2.0});
    }
  }
  return d;
}

LossGradient loss_and_gradient(const RankNetParams& p, const PairDataset& dataset) {
  if (dataset.samples.empty()) throw ContractViolation("ranking network: empty dataset");
  const Matrix x = stack(dataset.points, p.m);
  const Activations a = forward_batch(p, x);
  const LossParts parts = pair_loss(a.scores, dataset);

  // Backward through the batch; upstream is a row vector over points.
  const Eigen::RowVectorXd g = parts.upstream.transpose();
  const Vector d_w3 = a.h2 * g.transpose();
  const double d_b3 = g.sum();
  const Matrix d_pre2 = (p.w3 * g).cwiseProduct(relu_mask(a.pre2));
  const Matrix d_w2 = d_pre2 * a.h1.transpose();
  const Vector d_b2 = d_pre2.rowwise().sum();
  const Matrix d_pre1 = (p.w2.transpose() * d_pre2).cwiseProduct(relu_mask(a.pre1));
  const Matrix d_w1 = d_pre1 * a.z.transpose();
  const Vector d_b1 = d_pre1.rowwise().sum();
  const Matrix d_z = p.w1.transpose() * d_pre1;
  Matrix d_pre0 = d_z.bottomRows(p.n);
  if (p.psi_relu) d_pre0 = d_pre0.cwiseProduct(relu_mask(a.pre0));
  const Matrix d_psi_w = d_pre0 * x.transpose();
  const Vector d_psi_b = d_pre0.rowwise().sum();

  RankNetParams grad = p;
  grad.psi_w = d_psi_w;
  grad.psi_b = d_psi_b;
  grad.w1 = d_w1;
  grad.b1 = d_b1;
  grad.w2 = d_w2;
  grad.b2 = d_b2;
  grad.w3 = d_w3;
  grad.b3 = d_b3;
  return {parts.loss, grad.flatten()};
}

double mean_loss(const RankNetParams& p, const PairDataset& dataset) {
  if (dataset.samples.empty()) throw ContractViolation("ranking network: empty dataset");
  const Activations a = forward_batch(p, stack(dataset.points, p.m));
  return pair_loss(a.scores, dataset).loss;
}

TrainResult train(RankNetParams params, const PairDataset& dataset, const TrainOptions& options) {
  if (dataset.samples.empty()) throw ContractViolation("train: empty dataset");
  const auto count = static_cast<Eigen::Index>(params.parameter_count());
  if (params.adam.first.size() != count) {
    params.adam = {Vector::Zero(count), Vector::Zero(count), 0};
  }
  TrainResult result;
  std::vector<double> history;
  history.reserve(static_cast<std::size_t>(options.epochs) + 1);
  Vector theta = params.flatten();
  auto& adam = params.adam;

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    params.assign(theta);
    const LossGradient lg = loss_and_gradient(params, dataset);
    if (!std::isfinite(lg.loss) || !lg.gradient.allFinite()) {
      throw TrainingDivergence("ranking network training produced a non-finite loss");
    }
    if (epoch == 0) result.initial_loss = lg.loss;
    history.push_back(lg.loss);
    const auto w = static_cast<std::size_t>(options.early_stop_window);
    if (history.size() > w && history[history.size() - 1 - w] - lg.loss < options.early_stop_delta) {
      break;
    }
    ++adam.steps;
    adam.first = options.beta1 * adam.first + (1.0 - options.beta1) * lg.gradient;
    adam.second =
        options.beta2 * adam.second + (1.0 - options.beta2) * lg.gradient.cwiseAbs2();
    const double c1 = 1.0 - std::pow(options.beta1, adam.steps);
    const double c2 = 1.0 - std::pow(options.beta2, adam.steps);
    theta.array() -= options.lr * (adam.first.array() / c1) /
                     ((adam.second.array() / c2).sqrt() + options.epsilon);
    result.epochs_run = epoch + 1;
  }
  params.assign(theta);
  result.final_loss = mean_loss(params, dataset);
  if (!std::isfinite(result.final_loss)) {
    throw TrainingDivergence("ranking network training produced a non-finite loss");
  }
  ++params.generation_id;
  result.params = std::move(params);
  return result;
}

std::size_t pool_trigger_size(std::size_t parameter_count) {
  const std::size_t target = 10 * parameter_count;
  std::size_t n = 2;
  while (n * (n - 1) < target) ++n;
  return n;
}

std::size_t pool_trigger_size(const RankNetParams& params) {
  return pool_trigger_size(params.parameter_count());
}

std::optional<double> model_accuracy(const RankNetParams& params, const PairDataset& dataset) {
  const Activations a = forward_batch(params, stack(dataset.points, params.m));
  std::size_t correct = 0;
  std::size_t total = 0;
  for (const auto& s : dataset.samples) {
    if (s.label == 0.5) continue;
    ++total;
    const double y = sigmoid(a.scores[static_cast<Eigen::Index>(s.first)] -
                             a.scores[static_cast<Eigen::Index>(s.second)]);
    if ((y > 0.5 && s.label == 1.0) || (y < 0.5 && s.label == 0.0)) ++correct;
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace crblea
