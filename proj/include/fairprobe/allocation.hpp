// Copyright 2026 The FairProbe Authors.
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

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fairprobe/errors.hpp"
#include "fairprobe/matrix.hpp"

namespace fairprobe {

// Where a column of a value matrix came from.
enum class ValueSource { realized, mean, ucb };

// Per-agent, per-arm values in [0,1] fed to the welfare objective. Probed
// columns hold realized rewards; the rest hold means or optimistic bounds.
class ValueMatrix {
 public:
  ValueMatrix() = default;
  explicit ValueMatrix(Matrix values, ValueSource source = ValueSource::mean)
      : ValueMatrix(values, std::vector<ValueSource>(values.cols(), source)) {}

  ValueMatrix(Matrix values, std::vector<ValueSource> sources)
      : values_(std::move(values)), sources_(std::move(sources)) {
    if (sources_.size() != values_.cols()) {
      throw DomainError("value matrix: one provenance tag per column required");
    }
    for (double v : values_.data()) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw DomainError("value matrix: entry " + std::to_string(v) +
                          " outside [0,1]");
      }
    }
  }

  const Matrix& values() const noexcept { return values_; }
  double operator()(std::size_t j, std::size_t a) const { return values_(j, a); }
  std::size_t num_agents() const noexcept { return values_.rows(); }
  std::size_t num_arms() const noexcept { return values_.cols(); }
  ValueSource source(std::size_t a) const { return sources_.at(a); }

 private:
  Matrix values_;
  std::vector<ValueSource> sources_;
};

enum class RowMode { exact_one, at_most_one };

// Feasible set for allocations: entries vanish outside allowed arms, each
// row sums to exactly one (or at most one) and column a sums to at most
// capacity[a].
struct PolytopeSpec {
  std::vector<bool> allowed;
  RowMode row_mode = RowMode::exact_one;
  std::vector<double> capacity;

  static PolytopeSpec full(std::vector<double> capacity,
                           RowMode mode = RowMode::exact_one) {
    PolytopeSpec s;
    s.allowed.assign(capacity.size(), true);
    s.row_mode = mode;
    s.capacity = std::move(capacity);
    return s;
  }

  std::size_t num_arms() const noexcept { return allowed.size(); }

  double allowed_capacity() const {
    double total = 0.0;
    for (std::size_t a = 0; a < allowed.size(); ++a) {
      if (allowed[a]) total += capacity[a];
    }
    return total;
  }

  // Throws when malformed or when the polytope is empty for M agents.
  void validate(std::size_t num_agents) const {
    if (capacity.size() != allowed.size()) {
      throw DomainError("polytope: capacity and allowed-arm lengths differ");
    }
    for (double c : capacity) {
      if (!(c > 0.0)) throw DomainError("polytope: arm capacities must be positive");
    }
    if (row_mode == RowMode::exact_one) {
      if (std::none_of(allowed.begin(), allowed.end(), [](bool b) { return b; })) {
        throw InfeasibleError("polytope: no allowed arms but rows must sum to 1");
      }
      const double total = allowed_capacity();
      if (static_cast<double>(num_agents) > total + 1e-12) {
        throw InfeasibleError("polytope: total allowed arm capacity " +
                              std::to_string(total) + " is below agent count " +
                              std::to_string(num_agents));
      }
    }
  }
};

// max(1, ceil(M / A)) for every arm.
inline std::vector<double> default_capacity(std::size_t M, std::size_t A) {
  const double c = std::max<std::size_t>(1, (M + A - 1) / A);
  return std::vector<double>(A, c);
}

struct AllocationPolicy {
  Matrix pi;
  std::vector<double> capacity;
  bool restricted = false;  // rows may sum to less than one

  std::size_t num_agents() const noexcept { return pi.rows(); }
  std::size_t num_arms() const noexcept { return pi.cols(); }

  // Largest violation of the box, row and column constraints.
  double max_violation() const {
    double worst = 0.0;
    for (double v : pi.data()) {
      worst = std::max(worst, std::max(-v, v - 1.0));
    }
    for (std::size_t j = 0; j < pi.rows(); ++j) {
      const double s = pi.row_sum(j);
      worst = std::max(worst, restricted ? s - 1.0 : std::abs(s - 1.0));
    }
    for (std::size_t a = 0; a < pi.cols(); ++a) {
      const double cap = a < capacity.size() ? capacity[a] : 1.0;
      worst = std::max(worst, pi.col_sum(a) - cap);
    }
    return worst;
  }

  bool feasible(double tol = 1e-6) const { return max_violation() <= tol; }
};

// Sum_a pi(j,a) v(j,a) for every agent.
inline std::vector<double> agent_utilities(const Matrix& values, const Matrix& pi) {
  require_same_shape(values, pi, "agent utilities");
  std::vector<double> u(values.rows(), 0.0);
  for (std::size_t j = 0; j < values.rows(); ++j) {
    for (std::size_t a = 0; a < values.cols(); ++a) u[j] += pi(j, a) * values(j, a);
  }
  return u;
}

// Nash social welfare prod_j sum_a pi(j,a) v(j,a).
inline double nsw_value(const Matrix& values, const Matrix& pi) {
  double prod = 1.0;
  for (double u : agent_utilities(values, pi)) {
    if (u <= 0.0) return 0.0;
    prod *= u;
  }
  return prod;
}

inline double nsw_value(const ValueMatrix& values, const AllocationPolicy& policy) {
  return nsw_value(values.values(), policy.pi);
}

}  // namespace fairprobe
