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

#include "crblea/common.hpp"

#include <algorithm>

namespace crblea {

Bounds::Bounds(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  for (const auto& iv : intervals_) {
    if (!(iv.low < iv.high)) {
      throw ContractViolation("bound pair must satisfy low < high");
    }
  }
}

bool Bounds::contains(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != intervals_.size()) return false;
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    if (x[i] < intervals_[i].low || x[i] > intervals_[i].high) return false;
  }
  return true;
}

Vector Bounds::clip(Vector x) const {
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    x[i] = std::clamp(x[i], intervals_[i].low, intervals_[i].high);
  }
  return x;
}

Vector Bounds::lows() const {
  Vector v(intervals_.size());
  for (std::size_t i = 0; i < intervals_.size(); ++i) v[i] = intervals_[i].low;
  return v;
}

Vector Bounds::widths() const {
  Vector v(intervals_.size());
  for (std::size_t i = 0; i < intervals_.size(); ++i) v[i] = intervals_[i].width();
  return v;
}

Vector Bounds::normalize(const Vector& x) const {
  return ((x - lows()).array() / widths().array()).matrix();
}

Vector Bounds::denormalize(const Vector& unit) const {
  return lows() + (unit.array() * widths().array()).matrix();
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw ContractViolation("Rng::index on empty range");
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

Vector Rng::uniform_in(const Bounds& bounds) {
  Vector x(bounds.size());
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    x[i] = uniform(bounds[i].low, bounds[i].high);
  }
  return x;
}

Vector Rng::normal_vector(Eigen::Index dim) {
  Vector z(dim);
  for (Eigen::Index i = 0; i < dim; ++i) z[i] = normal();
  return z;
}

}  // namespace crblea
