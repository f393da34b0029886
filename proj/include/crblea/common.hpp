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

#ifndef CRBLEA_COMMON_HPP_
#define CRBLEA_COMMON_HPP_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace crblea {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Thrown when a caller breaks a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Invalid or unsupported configuration (problem index, engine knobs, config
// files). The message carries the offending field path where one exists.
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A problem evaluator returned a non-finite value. Carries the inputs.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, Vector x_u, Vector x_l)
      : std::runtime_error(what), x_u_(std::move(x_u)), x_l_(std::move(x_l)) {}

  const Vector& x_u() const { return x_u_; }
  const Vector& x_l() const { return x_l_; }

 private:
  Vector x_u_;
  Vector x_l_;
};

// Network training produced a non-finite loss.
class TrainingDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Interval {
  double low = 0.0;
  double high = 1.0;

  double width() const { return high - low; }
};

// Box constraints, one interval per coordinate.
class Bounds {
 public:
  Bounds() = default;
  explicit Bounds(std::vector<Interval> intervals);

  std::size_t size() const { return intervals_.size(); }
  const Interval& operator[](std::size_t i) const { return intervals_[i]; }
  const std::vector<Interval>& intervals() const { return intervals_; }

  bool contains(const Vector& x) const;
  Vector clip(Vector x) const;
  Vector lows() const;
  Vector widths() const;
  // Min-max map onto the unit cube; the inverse of `denormalize`.
  Vector normalize(const Vector& x) const;
  Vector denormalize(const Vector& unit) const;

 private:
  std::vector<Interval> intervals_;
};

// Seeded random stream shared by every stochastic component of a run.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return unit_(engine_); }
  double uniform(double low, double high) { return low + (high - low) * uniform(); }
  double normal() { return normal_(engine_); }
  // Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  std::uint64_t next_seed() { return engine_(); }

  Vector uniform_in(const Bounds& bounds);
  Vector normal_vector(Eigen::Index dim);

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace crblea

#endif  // CRBLEA_COMMON_HPP_
