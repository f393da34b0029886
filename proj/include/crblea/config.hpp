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

#ifndef CRBLEA_CONFIG_HPP_
#define CRBLEA_CONFIG_HPP_

#include <cstdint>
#include <string>

#include "crblea/optimizers.hpp"

namespace crblea {

enum class Mode { Nested, CR, CRNoNet, CRNoResample };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& name);

// What the lower-level stagnation window watches: the best member of the
// current population, or the best point seen so far. For DE the two coincide
// because its population is elitist. For CMA-ES the generation best keeps
// moving until the sampling distribution contracts, while the best-so-far
// can sit on a lucky early sample.
enum class LowerSignal { BestSoFar, GenerationBest };

std::string to_string(LowerSignal signal);

struct TerminationRule {
  std::int64_t fes_u_max = 2500;
  std::int64_t fes_u_var_window = 350;
  double upper_var_eps = 1e-6;
  std::int64_t fes_l_max = 250;
  std::int64_t fes_l_var_window = 25;
  double lower_var_eps = 1e-5;
  double target_acc = 1e-6;
  LowerSignal lower_signal = LowerSignal::GenerationBest;
};

enum class InitMode { Fresh, Warm };

// Frame used to min-max scale network inputs: the problem's upper bounds, or
// the bounding box of the pool each network generation was trained on.
enum class InputFrame { Bounds, Pool };

struct NetConfig {
  int width = 0;  // hidden width q; 0 selects max(8, 4 (m + n))
  int epochs = 200;
  double lr = 0.1;
  InitMode init = InitMode::Fresh;
  bool psi_relu = true;
  InputFrame frame = InputFrame::Bounds;
  double early_stop_delta = 1e-5;
  int early_stop_window = 20;
};

struct HarnessConfig {
  std::string problem = "smd1";
  int m = 2;
  int n = 3;
  Mode mode = Mode::Nested;
  // pop_size <= 0 selects the population formula for that level.
  OptimizerConfig upper{EngineKind::DE, 0};
  OptimizerConfig lower{EngineKind::DE, 0};
  TerminationRule termination;
  NetConfig net;
  int runs = 21;
  std::uint64_t base_seed = 1;
  std::string output_dir = "results";
  int jobs = 1;
  // Mode used for the variant side of `compare`/`suite` when only one
  // config is given.
  Mode variant_mode = Mode::CR;
};

// 4 + floor(ln(m + n)) and 4 + floor(ln(n)).
int upper_population_formula(int m, int n);
int lower_population_formula(int n);

int effective_upper_pop(const HarnessConfig& cfg);
int effective_lower_pop(const HarnessConfig& cfg);
int effective_width(const HarnessConfig& cfg);

// Throws ConfigurationError naming the offending field.
void validate(const HarnessConfig& cfg);

// Reads an INI-style file:
//
//   problem = smd1
//   mode = cr
//   [upper]
//   optimizer = de
//
// Section keys are addressed as "section.key" ("upper.optimizer"). Unknown
// keys and malformed values raise ConfigurationError with the key path.
HarnessConfig load_config(const std::string& path);
HarnessConfig parse_config(const std::string& text);

// Canonical text form covering everything that shapes a run except the seed
// schedule and output location.
std::string canonical_form(const HarnessConfig& cfg);
std::string fingerprint(const HarnessConfig& cfg);

}  // namespace crblea

#endif  // CRBLEA_CONFIG_HPP_
