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
#include <numeric>
#include <vector>

#include <doctest.h>

#include "crblea/common.hpp"
#include "crblea/stats.hpp"

using namespace crblea;

namespace {

RunRecord record(double fes_t, double acc_u = 1.0) {
  RunRecord r;
  r.problem = "smd1";
  r.mode = "cr";
  r.fes_u = static_cast<std::int64_t>(fes_t / 10);
  r.fes_l = static_cast<std::int64_t>(fes_t) - r.fes_u;
  r.fes_t = static_cast<std::int64_t>(fes_t);
  r.acc_u = acc_u;
  r.acc_l = acc_u;
  return r;
}

// Two-sided permutation p-value of U with midranks, by brute force over
// every split of the pooled sample.
double permutation_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t N = pooled.size();
  std::vector<double> rank(N);
  for (std::size_t i = 0; i < N; ++i) {
    double less = 0, equal = 0;
    for (double v : pooled) {
      less += v < pooled[i];
      equal += v == pooled[i];
    }
    rank[i] = less + (equal + 1) / 2.0;
  }
  const double n1 = static_cast<double>(a.size());
  const double mean_u = n1 * static_cast<double>(b.size()) / 2.0;
  double observed = 0;
  for (std::size_t i = 0; i < a.size(); ++i) observed += rank[i];
  observed = std::abs(observed - n1 * (n1 + 1) / 2 - mean_u);
  int total = 0, extreme = 0;
  for (unsigned mask = 0; mask < (1u << N); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != a.size()) continue;
    double s = 0;
    for (std::size_t i = 0; i < N; ++i) {
      if (mask & (1u << i)) s += rank[i];
    }
    ++total;
    if (std::abs(s - n1 * (n1 + 1) / 2 - mean_u) >= observed - 1e-12) ++extreme;
  }
  return static_cast<double>(extreme) / total;
}

}  // namespace

TEST_CASE("accuracy clamps at the floor") {
  CHECK(accuracy(2.0, 2.0) == 1e-6);
  CHECK(accuracy(1.0 + 3.2e-7, 1.0) == 1e-6);
  CHECK(accuracy(1.5, 1.0) == doctest::Approx(0.5));
  CHECK(accuracy(0.5, 1.0) == accuracy(1.5, 1.0));
  CHECK(accuracy(-4.0, 4.0) == 8.0);
}

TEST_CASE("resource saving rate") {
  CHECK(resource_saving_rate(1.28e4, 2.03e4) == doctest::Approx(36.9458).epsilon(1e-4));
  CHECK(resource_saving_rate(5.0, 5.0) == 0.0);
  CHECK(resource_saving_rate(1.69e4, 1.68e4) == doctest::Approx(-0.595238).epsilon(1e-4));
  CHECK_THROWS_AS(resource_saving_rate(1.0, 0.0), ContractViolation);
}

TEST_CASE("median") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK_THROWS_AS(median({}), ContractViolation);
}

TEST_CASE("rank-sum marks") {
  const std::vector<double> same{1, 2, 3, 4, 5};
  CHECK(wilcoxon_ranksum(same, same).mark == Mark::Equivalent);

  const std::vector<double> tens(21, 10.0), ones(21, 1.0);
  const auto r = wilcoxon_ranksum(tens, ones);
  CHECK(r.mark == Mark::Better);
  CHECK(r.p_value < 1e-6);
  CHECK(wilcoxon_ranksum(ones, tens).mark == Mark::Worse);

  const std::vector<double> a{1, 2, 3}, b{2, 3, 4};
  CHECK(wilcoxon_ranksum_exact(a, b).mark == Mark::Equivalent);
  CHECK(wilcoxon_ranksum(a, b).mark == Mark::Equivalent);

  const std::vector<double> flat{7, 7, 7};
  CHECK(wilcoxon_ranksum(flat, flat).mark == Mark::Equivalent);
  CHECK_THROWS_AS(wilcoxon_ranksum(std::vector<double>{1.0}, a), ContractViolation);
}

TEST_CASE("normal approximation agrees with scipy mannwhitneyu") {
  // scipy.stats.mannwhitneyu(..., alternative='two-sided',
  // method='asymptotic', use_continuity=True)
  struct Case {
    std::vector<double> a, b;
    double u, p;
  };
  const std::vector<Case> cases{
      {{1, 2, 3}, {2, 3, 4}, 2.0, 0.36868826936178156},
      {{3.1, 2.7, 5.5, 4.0, 3.3, 6.1, 2.2, 4.8, 3.9, 5.0, 4.4},
       {1.2, 2.0, 2.9, 1.7, 3.0, 2.5, 1.1, 2.2, 1.9, 2.8, 3.5},
       109.5,
       0.0014442794064882388},
      {{1, 1, 2, 2, 3}, {2, 2, 3, 3, 4}, 5.0, 0.12512238701328704},
  };
  for (const auto& c : cases) {
    const auto r = wilcoxon_ranksum(c.a, c.b);
    CHECK(r.u == doctest::Approx(c.u));
    CHECK(r.p_value == doctest::Approx(c.p).epsilon(1e-9));
  }
}

TEST_CASE("exact test matches brute-force permutation") {
  const std::vector<std::pair<std::vector<double>, std::vector<double>>> cases{
      {{1, 2, 3}, {2, 3, 4}},
      {{1, 2, 3, 4}, {5, 6, 7, 8}},
      {{1, 1, 2, 5}, {2, 3, 3, 3, 9}},
      {{0.5, 0.1, 0.9, 0.3, 0.7, 0.2}, {0.4, 0.8, 0.6, 1.0, 1.1, 1.2}},
  };
  for (const auto& [a, b] : cases) {
    CHECK(wilcoxon_ranksum_exact(a, b).p_value == doctest::Approx(permutation_p(a, b)));
  }
  CHECK(wilcoxon_ranksum_exact(std::vector<double>{1, 2, 3, 4}, std::vector<double>{5, 6, 7, 8})
            .mark == Mark::Worse);  // p = 2/70, the variant is larger
}

TEST_CASE("swapping samples mirrors significant marks") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a, b;
    const double shift = rng.uniform(0.0, 2.0);
    for (int i = 0; i < 11; ++i) {
      a.push_back(rng.normal());
      b.push_back(rng.normal() + shift);
    }
    const Mark ab = wilcoxon_ranksum(a, b).mark;
    const Mark ba = wilcoxon_ranksum(b, a).mark;
    if (ab == Mark::Equivalent) {
      CHECK(ba == Mark::Equivalent);
    } else {
      CHECK(ba == (ab == Mark::Better ? Mark::Worse : Mark::Better));
    }
  }
}

TEST_CASE("aggregate takes per-field medians") {
  const std::vector<RunRecord> one{record(100, 0.3)};
  const SummaryRow s1 = aggregate(one);
  CHECK(s1.fes_t == 100);
  CHECK(s1.acc_u == 0.3);
  CHECK(s1.runs == 1);

  std::vector<RunRecord> three{record(10), record(30), record(20)};
  CHECK(aggregate(three).fes_t == 20);
  std::vector<RunRecord> four{record(40), record(10), record(30), record(20)};
  CHECK(aggregate(four).fes_t == 25);
  std::reverse(four.begin(), four.end());
  CHECK(aggregate(four).fes_t == 25);

  std::vector<RunRecord> mixed{record(10), record(20)};
  mixed[1].mode = "nested";
  CHECK_THROWS_AS(aggregate(mixed), ContractViolation);
  CHECK_THROWS_AS(aggregate(std::vector<RunRecord>{}), ContractViolation);
}

TEST_CASE("mean model accuracy") {
  std::vector<RunRecord> rs{record(1), record(2)};
  CHECK_FALSE(mean_model_accuracy(rs).has_value());
  rs[0].model_acc_history = {0.5, 0.7};
  rs[1].model_acc_history = {0.9};
  CHECK(*mean_model_accuracy(rs) == doctest::Approx(0.7));
}
