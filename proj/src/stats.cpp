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

#include "crblea/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "crblea/common.hpp"

namespace crblea {

namespace {

struct Ranking {
  std::vector<double> ranks;      // midranks of the pooled sample, a first
  double tie_term = 0.0;          // sum over tie groups of t^3 - t
};

Ranking pooled_midranks(std::span<const double> a, std::span<const double> b) {
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<std::size_t> order(pooled.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });
  Ranking r;
  r.ranks.assign(pooled.size(), 0.0);
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r.ranks[order[k]] = mid;
    const double t = static_cast<double>(j - i + 1);
    r.tie_term += t * t * t - t;
    i = j + 1;
  }
  return r;
}

double u_statistic(const std::vector<double>& ranks, std::size_t n1) {
  double r1 = 0.0;
  for (std::size_t i = 0; i < n1; ++i) r1 += ranks[i];
  const double n = static_cast<double>(n1);
  return r1 - n * (n + 1.0) / 2.0;
}

Mark orient(double p, double alpha, std::span<const double> a, std::span<const double> b,
            double u, double mean) {
  if (!(p < alpha)) return Mark::Equivalent;
  const double ma = median({a.begin(), a.end()});
  const double mb = median({b.begin(), b.end()});
  if (mb < ma) return Mark::Better;
  if (mb > ma) return Mark::Worse;
  // Equal medians: fall back to the rank direction.
  return u > mean ? Mark::Better : Mark::Worse;
}

void check_sizes(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw ContractViolation("rank-sum test needs at least two observations per sample");
  }
}

}  // namespace

double accuracy(double found, double known) {
  return std::max(std::abs(known - found), kAccuracyFloor);
}

double resource_saving_rate(double fes_t_A, double fes_t_B) {
  if (fes_t_B == 0.0) throw ContractViolation("resource saving rate: zero denominator");
  return (fes_t_B - fes_t_A) / fes_t_B * 100.0;
}

double median(std::vector<double> values) {
  if (values.empty()) throw ContractViolation("median of empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

std::string to_string(Mark mark) {
  switch (mark) {
    case Mark::Better: return "+";
    case Mark::Worse: return "-";
    default: return "≈";
  }
}

RankSumResult wilcoxon_ranksum(std::span<const double> a, std::span<const double> b,
                               double alpha) {
  check_sizes(a, b);
  const auto ranking = pooled_midranks(a, b);
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  const double n = n1 + n2;
  RankSumResult out;
  out.u = u_statistic(ranking.ranks, a.size());
  const double mean = n1 * n2 / 2.0;
  const double var = n1 * n2 / 12.0 * ((n + 1.0) - ranking.tie_term / (n * (n - 1.0)));
  if (var <= 0.0) return out;
  const double z = std::max(0.0, std::abs(out.u - mean) - 0.5) / std::sqrt(var);
  out.p_value = std::erfc(z / std::sqrt(2.0));
  out.mark = orient(out.p_value, alpha, a, b, out.u, mean);
  return out;
}

RankSumResult wilcoxon_ranksum_exact(std::span<const double> a, std::span<const double> b,
                                     double alpha) {
  check_sizes(a, b);
  const std::size_t n1 = a.size();
  const std::size_t total = a.size() + b.size();
  double combos = 1.0;
  for (std::size_t i = 0; i < n1; ++i) {
    combos *= static_cast<double>(total - i) / static_cast<double>(i + 1);
  }
  if (combos > 2e6) throw ContractViolation("exact rank-sum: sample too large to enumerate");

  const auto ranking = pooled_midranks(a, b);
  RankSumResult out;
  out.u = u_statistic(ranking.ranks, n1);
  const double mean = static_cast<double>(n1 * b.size()) / 2.0;
  const double observed = std::abs(out.u - mean);

  const double offset = static_cast<double>(n1) * (static_cast<double>(n1) + 1.0) / 2.0;
  std::size_t extreme = 0;
  std::size_t count = 0;
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t start,
                                                                   std::size_t left, double sum) {
    if (left == 0) {
      ++count;
      if (std::abs(sum - offset - mean) >= observed - 1e-9) ++extreme;
      return;
    }
    for (std::size_t i = start; i + left <= total; ++i) walk(i + 1, left - 1, sum + ranking.ranks[i]);
  };
  walk(0, n1, 0.0);
  out.p_value = static_cast<double>(extreme) / static_cast<double>(count);
  if (ranking.tie_term == static_cast<double>(total * total * total - total)) {
    out.p_value = 1.0;  // every observation tied
  }
  out.mark = orient(out.p_value, alpha, a, b, out.u, mean);
  return out;
}

SummaryRow aggregate(std::span<const RunRecord> records) {
  if (records.empty()) throw ContractViolation("aggregate needs at least one record");
  SummaryRow row;
  row.problem = records.front().problem;
  row.mode = records.front().mode;
  row.runs = records.size();
  std::vector<double> acc_u, acc_l, fes_u, fes_l, fes_t;
  for (const auto& r : records) {
    if (r.problem != row.problem || r.mode != row.mode) {
      throw ContractViolation("aggregate: records mix problems or modes");
    }
    acc_u.push_back(r.acc_u);
    acc_l.push_back(r.acc_l);
    fes_u.push_back(static_cast<double>(r.fes_u));
    fes_l.push_back(static_cast<double>(r.fes_l));
    fes_t.push_back(static_cast<double>(r.fes_t));
  }
  row.acc_u = median(acc_u);
  row.acc_l = median(acc_l);
  row.fes_u = median(fes_u);
  row.fes_l = median(fes_l);
  row.fes_t = median(fes_t);
  return row;
}

std::optional<double> mean_model_accuracy(std::span<const RunRecord> records) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& r : records) {
    for (double v : r.model_acc_history) {
      sum += v;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

}  // namespace crblea
