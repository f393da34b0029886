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

#ifndef CRBLEA_LEDGER_HPP_
#define CRBLEA_LEDGER_HPP_

#include <cstdint>
#include <vector>

namespace crblea {

struct TracePoint {
  std::int64_t fes_t = 0;
  double best_F = 0.0;
};

// Per-run function-evaluation counters. Single writer.
class EvalLedger {
 public:
  void count_upper() { ++fes_u_; }
  void count_lower() { ++fes_l_; }

  std::int64_t fes_u() const { return fes_u_; }
  std::int64_t fes_l() const { return fes_l_; }
  std::int64_t fes_t() const { return fes_u_ + fes_l_; }

  // Records the current totals against the elitist upper objective. The
  // stored best_F never increases: a worse value repeats the previous one.
  void checkpoint(double best_F);
  const std::vector<TracePoint>& trace() const { return trace_; }

 private:
  std::int64_t fes_u_ = 0;
  std::int64_t fes_l_ = 0;
  std::vector<TracePoint> trace_;
};

}  // namespace crblea

#endif  // CRBLEA_LEDGER_HPP_
