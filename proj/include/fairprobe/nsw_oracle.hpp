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
#include <numeric>
#include <vector>

#include "fairprobe/allocation.hpp"
#include "fairprobe/errors.hpp"
#include "fairprobe/nsw_solver.hpp"

namespace fairprobe {

namespace detail {

// All vectors over n slots with entries in {0, ..., res} summing to exactly
// res (or at most res).
inline void enumerate_compositions(std::size_t n, int res, bool at_most,
                                   std::vector<std::vector<int>>& out) {
  std::vector<int> cur(n, 0);
  auto rec = [&](auto&& self, std::size_t pos, int left) -> void {
    if (pos + 1 == n) {
      if (at_most) {
        for (int k = 0; k <= left; ++k) {
          cur[pos] = k;
          out.push_back(cur);
        }
      } else {
        cur[pos] = left;
        out.push_back(cur);
      }
      return;
    }
    for (int k = 0; k <= left; ++k) {
      cur[pos] = k;
      self(self, pos + 1, left - k);
    }
  };
  if (n == 0) {
    out.emplace_back();
    return;
  }
  rec(rec, 0, res);
}

}  // namespace detail

// Brute-force reference for solve_nsw on tiny instances (M <= 3, A <= 3).
//
// Every agent but the last ranges over rows whose entries are multiples of
// 1/grid_resolution. The last agent's best response to the remaining
// capacity is a fractional knapsack and is filled greedily by value, so it
// is exact rather than gridded.
inline NswSolution solve_nsw_oracle(const ValueMatrix& values, const PolytopeSpec& spec,
                                    int grid_resolution) {
  const std::size_t M = values.num_agents();
  const std::size_t A = values.num_arms();
  if (M > 3 || A > 3) {
    throw CostGuardError("nsw oracle: instance " + std::to_string(M) + "x" +
                         std::to_string(A) + " exceeds the 3x3 limit");
  }
  if (grid_resolution < 1) throw DomainError("nsw oracle: resolution must be >= 1");
  if (spec.num_arms() != A) throw DomainError("nsw oracle: polytope/value arm mismatch");
  spec.validate(M);

  std::vector<std::size_t> idx;
  for (std::size_t a = 0; a < A; ++a) {
    if (spec.allowed[a]) idx.push_back(a);
  }
  const bool at_most = spec.row_mode == RowMode::at_most_one;
  std::vector<std::vector<int>> rows;
  detail::enumerate_compositions(idx.size(), grid_resolution, at_most, rows);
  const double combos = std::pow(static_cast<double>(rows.size()),
                                 static_cast<double>(M > 0 ? M - 1 : 0));
  if (combos > 5e7) {
    throw CostGuardError("nsw oracle: " + std::to_string(combos) +
                         " grid combinations exceed the 5e7 limit");
  }
  const double h = 1.0 / grid_resolution;
  const Matrix& v = values.values();

  std::vector<double> remaining(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) remaining[i] = spec.capacity[idx[i]];

  // Last agent's arms by decreasing value.
  std::vector<std::size_t> order(idx.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const double vx = v(M - 1, idx[x]), vy = v(M - 1, idx[y]);
    return vx != vy ? vx > vy : x < y;
  });

  double best = -1.0;
  std::vector<std::size_t> chosen(M > 0 ? M - 1 : 0), best_rows(chosen.size());
  std::vector<double> last_fill(idx.size()), best_last(idx.size());

  auto fill_last = [&](double& u_last) -> bool {
    double mass = 1.0;
    u_last = 0.0;
    std::fill(last_fill.begin(), last_fill.end(), 0.0);
    for (std::size_t i : order) {
      const double take = std::min(mass, std::max(remaining[i], 0.0));
      last_fill[i] = take;
      u_last += take * v(M - 1, idx[i]);
      mass -= take;
      if (mass <= 0.0) break;
    }
    return at_most || mass <= 1e-12;
  };

  auto rec = [&](auto&& self, std::size_t j, double prod) -> void {
    if (j + 1 == M) {
      double u_last = 0.0;
      if (!fill_last(u_last)) return;
      const double val = prod * u_last;
      if (val > best) {
        best = val;
        best_rows = chosen;
        best_last = last_fill;
      }
      return;
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& row = rows[r];
      bool ok = true;
      for (std::size_t i = 0; i < idx.size(); ++i) {
        if (row[i] * h > remaining[i] + 1e-12) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      double u = 0.0;
      for (std::size_t i = 0; i < idx.size(); ++i) u += row[i] * h * v(j, idx[i]);
      for (std::size_t i = 0; i < idx.size(); ++i) remaining[i] -= row[i] * h;
      chosen[j] = r;
      self(self, j + 1, prod * u);
      for (std::size_t i = 0; i < idx.size(); ++i) remaining[i] += row[i] * h;
    }
  };
  if (M > 0) rec(rec, 0, 1.0);
  if (best < 0.0) throw InfeasibleError("nsw oracle: no feasible grid allocation");

  Matrix pi(M, A, 0.0);
  for (std::size_t j = 0; j + 1 < M; ++j) {
    for (std::size_t i = 0; i < idx.size(); ++i) pi(j, idx[i]) = rows[best_rows[j]][i] * h;
  }
  for (std::size_t i = 0; i < idx.size(); ++i) pi(M - 1, idx[i]) = best_last[i];

  NswSolution sol;
  sol.value = nsw_value(v, pi);
  sol.policy = AllocationPolicy{std::move(pi), spec.capacity, at_most};
  return sol;
}

}  // namespace fairprobe
