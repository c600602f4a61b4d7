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
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairprobe/distribution.hpp"
#include "fairprobe/errors.hpp"
#include "fairprobe/matrix.hpp"
#include "fairprobe/rng.hpp"

namespace fairprobe {

// M x A grid of reward laws plus the derived mean matrix.
class RewardModel {
 public:
  RewardModel(std::size_t num_agents, std::size_t num_arms,
              std::vector<DiscreteDistribution> dists)
      : num_agents_(num_agents), num_arms_(num_arms), dists_(std::move(dists)) {
    if (num_agents_ == 0 || num_arms_ == 0) {
      throw DomainError("reward model: agent and arm counts must be positive");
    }
    if (dists_.size() != num_agents_ * num_arms_) {
      throw DomainError("reward model: expected " +
                        std::to_string(num_agents_ * num_arms_) +
                        " distributions, got " + std::to_string(dists_.size()));
    }
    means_ = Matrix(num_agents_, num_arms_);
    for (std::size_t j = 0; j < num_agents_; ++j) {
      for (std::size_t a = 0; a < num_arms_; ++a) means_(j, a) = dist(j, a).mean();
    }
  }

  std::size_t num_agents() const noexcept { return num_agents_; }
  std::size_t num_arms() const noexcept { return num_arms_; }

  const DiscreteDistribution& dist(std::size_t j, std::size_t a) const {
    return dists_[j * num_arms_ + a];
  }
  const std::vector<DiscreteDistribution>& dists() const noexcept { return dists_; }
  const Matrix& means() const noexcept { return means_; }
  double mean(std::size_t j, std::size_t a) const { return means_(j, a); }

  bool operator==(const RewardModel& o) const {
    return num_agents_ == o.num_agents_ && num_arms_ == o.num_arms_ &&
           dists_ == o.dists_;
  }

 private:
  std::size_t num_agents_;
  std::size_t num_arms_;
  std::vector<DiscreteDistribution> dists_;
  Matrix means_;
};

// Sorted set of probed arm indices with the probing budget it was drawn
// under.
class ProbeSet {
 public:
  ProbeSet() = default;
  explicit ProbeSet(std::vector<std::size_t> arms,
                    std::size_t budget = SIZE_MAX)
      : arms_(std::move(arms)), budget_(budget) {
    std::sort(arms_.begin(), arms_.end());
    if (std::adjacent_find(arms_.begin(), arms_.end()) != arms_.end()) {
      throw DomainError("probe set: duplicate arm index");
    }
    if (arms_.size() > budget_) {
      throw DomainError("probe set: " + std::to_string(arms_.size()) +
                        " arms exceed budget " + std::to_string(budget_));
    }
  }

  const std::vector<std::size_t>& arms() const noexcept { return arms_; }
  std::size_t size() const noexcept { return arms_.size(); }
  bool empty() const noexcept { return arms_.empty(); }
  std::size_t budget() const noexcept { return budget_; }

  bool contains(std::size_t a) const {
    return std::binary_search(arms_.begin(), arms_.end(), a);
  }

  ProbeSet with(std::size_t a) const {
    std::vector<std::size_t> next = arms_;
    next.push_back(a);
    return ProbeSet(std::move(next), budget_);
  }

  // Membership mask over num_arms arms. Throws on out-of-range indices.
  std::vector<bool> mask(std::size_t num_arms) const {
    std::vector<bool> m(num_arms, false);
    for (std::size_t a : arms_) {
      if (a >= num_arms) {
        throw DomainError("probe set: arm index " + std::to_string(a) +
                          " out of range for " + std::to_string(num_arms) +
                          " arms");
      }
      m[a] = true;
    }
    return m;
  }

  std::string to_string() const {
    std::string s = "{";
    for (std::size_t i = 0; i < arms_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(arms_[i]);
    }
    return s + "}";
  }

  bool operator==(const ProbeSet& o) const { return arms_ == o.arms_; }

 private:
  std::vector<std::size_t> arms_;
  std::size_t budget_ = SIZE_MAX;
};

// Probing overhead alpha(0..I): alpha(0) = 0, alpha(I) = 1, non-decreasing.
// A budget of zero (probing disabled) is the single-entry table {0}.
class OverheadFn {
 public:
  explicit OverheadFn(std::vector<double> table) : table_(std::move(table)) {
    if (table_.empty()) throw DomainError("overhead: empty table");
    if (table_.front() != 0.0) throw DomainError("overhead: alpha(0) must be 0");
    if (table_.size() > 1 && table_.back() != 1.0) {
      throw DomainError("overhead: alpha(I) must be 1");
    }
    for (std::size_t k = 1; k < table_.size(); ++k) {
      if (table_[k] < table_[k - 1]) {
        throw DomainError("overhead: table must be non-decreasing");
      }
      if (table_[k] > 1.0) throw DomainError("overhead: values must lie in [0,1]");
    }
  }

  // alpha(k) = k / I.
  static OverheadFn linear(std::size_t budget) {
    std::vector<double> t(budget + 1);
    for (std::size_t k = 0; k <= budget; ++k) {
      t[k] = budget == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(budget);
    }
    return OverheadFn(std::move(t));
  }

  std::size_t budget() const noexcept { return table_.size() - 1; }
  const std::vector<double>& table() const noexcept { return table_; }

  double operator()(std::size_t k) const {
    if (k >= table_.size()) {
      throw DomainError("overhead: probe size " + std::to_string(k) +
                        " exceeds budget " + std::to_string(budget()));
    }
    return table_[k];
  }

  // 1 - alpha(k), the multiplicative factor applied to the welfare.
  double keep(std::size_t k) const { return 1.0 - (*this)(k); }

  bool operator==(const OverheadFn&) const = default;

 private:
  std::vector<double> table_;
};

// Realized rewards for the probed columns of one round.
struct RewardDraw {
  Matrix values;              // meaningful only where probed[a] is true
  std::vector<bool> probed;   // per arm
  std::uint64_t seed = 0;

  std::optional<double> value(std::size_t j, std::size_t a) const {
    if (!probed.at(a)) return std::nullopt;
    return values(j, a);
  }
  bool empty() const {
    return std::none_of(probed.begin(), probed.end(), [](bool b) { return b; });
  }
};

// Draws R_{j,a} for every agent j and probed arm a. Arms are visited in
// ascending order, agents within an arm in ascending order.
inline RewardDraw sample_rewards(const RewardModel& model, const ProbeSet& arms,
                                 std::uint64_t seed) {
  RewardDraw draw{Matrix(model.num_agents(), model.num_arms()),
                  arms.mask(model.num_arms()), seed};
  Rng rng(seed);
  for (std::size_t a : arms.arms()) {
    for (std::size_t j = 0; j < model.num_agents(); ++j) {
      draw.values(j, a) = model.dist(j, a).sample(rng);
    }
  }
  return draw;
}

// Bernoulli rewards with success probability uniform in [mu_low, mu_high].
inline RewardModel make_bernoulli_env(std::size_t M, std::size_t A, double mu_low,
                                      double mu_high, std::uint64_t seed) {
  if (!(0.0 <= mu_low && mu_low <= mu_high && mu_high <= 1.0)) {
    throw DomainError("bernoulli env: need 0 <= mu_low <= mu_high <= 1");
  }
  Rng rng(seed);
  std::vector<DiscreteDistribution> dists;
  dists.reserve(M * A);
  for (std::size_t i = 0; i < M * A; ++i) {
    const double p = mu_low == mu_high ? mu_low
                                       : mu_low + (mu_high - mu_low) * rng.uniform();
    dists.push_back(DiscreteDistribution::bernoulli(p));
  }
  return RewardModel(M, A, std::move(dists));
}

// Each cell gets a probability vector drawn uniformly from the simplex over
// the shared support.
inline RewardModel make_discrete_env(std::size_t M, std::size_t A,
                                     std::vector<double> support,
                                     std::uint64_t seed) {
  if (support.empty()) throw DomainError("discrete env: empty support");
  std::sort(support.begin(), support.end());
  Rng rng(seed);
  std::vector<DiscreteDistribution> dists;
  dists.reserve(M * A);
  for (std::size_t i = 0; i < M * A; ++i) {
    std::vector<double> w(support.size());
    double total = 0.0;
    for (double& x : w) {
      x = -std::log1p(-rng.uniform());
      total += x;
    }
    if (total <= 0.0) {
      std::fill(w.begin(), w.end(), 1.0);
      total = static_cast<double>(w.size());
    }
    for (double& x : w) x /= total;
    dists.emplace_back(support, std::move(w));
  }
  return RewardModel(M, A, std::move(dists));
}

}  // namespace fairprobe
