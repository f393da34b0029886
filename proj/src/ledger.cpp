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

#include "crblea/ledger.hpp"

#include <algorithm>

namespace crblea {

void EvalLedger::checkpoint(double best_F) {
  if (!trace_.empty()) best_F = std::min(best_F, trace_.back().best_F);
  trace_.push_back({fes_t(), best_F});
}

}  // namespace crblea
