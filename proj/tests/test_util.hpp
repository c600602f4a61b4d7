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

#include <cstdint>
#include <vector>

#include "fairprobe/fairprobe.hpp"

namespace fairprobe::testing {

// Random model with per-cell supports of 1..max_support values drawn from a
// 0.1 grid, and random probabilities.
inline RewardModel random_small_model(std::size_t M, std::size_t A, std::size_t max_support,
                                      Rng& rng) {
  std::vector<DiscreteDistribution> dists;
  for (std::size_t i = 0; i < M * A; ++i) {
    const std::size_t k = 1 + rng.below(max_support);
    std::vector<int> grid(11);
    for (int v = 0; v <= 10; ++v) grid[v] = v;
    rng.shuffle(grid);
    grid.resize(k);
    std::sort(grid.begin(), grid.end());
    std::vector<double> support, probs;
    double total = 0.0;
    for (int v : grid) {
      support.push_back(v / 10.0);
      probs.push_back(0.05 + rng.uniform());
      total += probs.back();
    }
    for (double& p : probs) p /= total;
    dists.emplace_back(std::move(support), std::move(probs));
  }
  return RewardModel(M, A, std::move(dists));
}

inline Matrix random_matrix(std::size_t M, std::size_t A, Rng& rng, double lo = 0.0,
                            double hi = 1.0) {
  Matrix m(M, A);
  for (double& x : m.data()) x = lo + (hi - lo) * rng.uniform();
  return m;
}

// All subsets of {0..A-1} as probe sets.
inline std::vector<ProbeSet> all_subsets(std::size_t A) {
  std::vector<ProbeSet> out;
  for (std::uint64_t bits = 0; bits < (1ULL << A); ++bits) {
    std::vector<std::size_t> arms;
    for (std::size_t a = 0; a < A; ++a) {
      if (bits >> a & 1ULL) arms.push_back(a);
    }
    out.emplace_back(std::move(arms));
  }
  return out;
}

inline bool is_subset(const ProbeSet& s, const ProbeSet& t) {
  for (std::size_t a : s.arms()) {
    if (!t.contains(a)) return false;
  }
  return true;
}

}  // namespace fairprobe::testing
