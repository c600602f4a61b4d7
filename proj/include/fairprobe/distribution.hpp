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

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "fairprobe/errors.hpp"
#include "fairprobe/rng.hpp"

namespace fairprobe {

// Finite-support reward law on [0, 1].
//
// Support values are strictly increasing and probabilities sum to one
// within 1e-9. Zero-probability atoms are allowed so that Bernoulli(0) and
// Bernoulli(1) keep the {0, 1} support.
class DiscreteDistribution {
 public:
  DiscreteDistribution(std::vector<double> support, std::vector<double> probs)
      : support_(std::move(support)), probs_(std::move(probs)) {
    if (support_.empty()) throw DomainError("distribution: empty support");
    if (support_.size() != probs_.size()) {
      throw DomainError("distribution: support and probability lengths differ");
    }
    double total = 0.0;
    for (std::size_t k = 0; k < support_.size(); ++k) {
      const double x = support_[k];
      if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError("distribution: support value " + std::to_string(x) +
                          " outside [0,1]");
      }
      if (k > 0 && !(x > support_[k - 1])) {
        throw DomainError("distribution: support must be strictly increasing");
      }
      if (!(probs_[k] >= 0.0)) {
        throw DomainError("distribution: negative probability");
      }
      total += probs_[k];
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw DomainError("distribution: probabilities sum to " +
                        std::to_string(total));
    }
    for (std::size_t k = 0; k < support_.size(); ++k) mean_ += support_[k] * probs_[k];
  }

  static DiscreteDistribution bernoulli(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("bernoulli: p outside [0,1]");
    return DiscreteDistribution({0.0, 1.0}, {1.0 - p, p});
  }

  static DiscreteDistribution point_mass(double x) {
    return DiscreteDistribution({x}, {1.0});
  }

  const std::vector<double>& support() const noexcept { return support_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return support_.size(); }
  double mean() const noexcept { return mean_; }

  double variance() const noexcept {
    double v = 0.0;
    for (std::size_t k = 0; k < support_.size(); ++k) {
      const double d = support_[k] - mean_;
      v += probs_[k] * d * d;
    }
    return v;
  }

  // P(X <= x).
  double cdf(double x) const noexcept {
    double acc = 0.0;
    for (std::size_t k = 0; k < support_.size() && support_[k] <= x; ++k) {
      acc += probs_[k];
    }
    return acc;
  }

  double sample(Rng& rng) const { return support_[rng.categorical(probs_)]; }

  bool contains(double x) const noexcept {
    for (double s : support_) {
      if (s == x) return true;
    }
    return false;
  }

  bool operator==(const DiscreteDistribution& o) const {
    return support_ == o.support_ && probs_ == o.probs_;
  }

 private:
  std::vector<double> support_;
  std::vector<double> probs_;
  double mean_ = 0.0;
};

}  // namespace fairprobe
