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

namespace fairprobe {

// Concave piecewise-linear upper bound of log on (0, x_max], built from the
// tangent lines T_i(z) = log(tau_i) + (z - tau_i) / tau_i. Each tangent lies
// above log, so their lower envelope does too, and it touches log at every
// breakpoint.
struct PiecewiseLogUpper {
  std::vector<double> breakpoints;  // tau_0 < ... < tau_L = x_max
  double x_max = 1.0;

  std::size_t num_segments() const noexcept {
    return breakpoints.empty() ? 0 : breakpoints.size() - 1;
  }

  double tangent(std::size_t i, double z) const {
    const double t = breakpoints[i];
    return std::log(t) + (z - t) / t;
  }

  double slope(std::size_t i) const { return 1.0 / breakpoints[i]; }

  // Largest phi(z) - log(z) over [tau_0, x_max]. On each segment the gap
  // peaks where the two end tangents cross.
  double max_gap() const {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
      const double a = breakpoints[i];
      const double b = breakpoints[i + 1];
      const double z = std::log(b / a) * a * b / (b - a);
      worst = std::max(worst, tangent(i, z) - std::log(z));
    }
    return worst;
  }

  bool operator==(const PiecewiseLogUpper&) const = default;
};

// Geometric breakpoints tau0 = tau_0 < ... < tau_L = x_max with
// L = num_breakpoints - 1.
inline PiecewiseLogUpper build_phi(double x_max = 1.0, std::size_t num_breakpoints = 513,
                                   double tau0 = 1e-4) {
  if (!(tau0 > 0.0 && tau0 < x_max && std::isfinite(x_max))) {
    throw DomainError("build_phi: need 0 < tau0 < x_max, got tau0=" +
                      std::to_string(tau0) + " x_max=" + std::to_string(x_max));
  }
  if (num_breakpoints < 2) {
    throw DomainError("build_phi: at least 2 breakpoints required");
  }
  PiecewiseLogUpper phi;
  phi.x_max = x_max;
  phi.breakpoints.resize(num_breakpoints);
  const double L = static_cast<double>(num_breakpoints - 1);
  const double ratio = std::log(x_max / tau0);
  for (std::size_t i = 0; i < num_breakpoints; ++i) {
    phi.breakpoints[i] = tau0 * std::exp(ratio * static_cast<double>(i) / L);
  }
  phi.breakpoints.front() = tau0;
  phi.breakpoints.back() = x_max;
  return phi;
}

// Lower envelope of all tangents at z in [0, x_max]. For fixed z the
// tangent value grows with |log(tau) - log(z)|, so only the breakpoints
// bracketing z compete.
inline double phi_eval(const PiecewiseLogUpper& phi, double z) {
  if (!(z >= 0.0 && z <= phi.x_max)) {
    throw DomainError("phi_eval: argument " + std::to_string(z) + " outside [0, " +
                      std::to_string(phi.x_max) + "]");
  }
  const auto& tau = phi.breakpoints;
  if (z <= tau.front()) return phi.tangent(0, z);
  const auto it = std::upper_bound(tau.begin(), tau.end(), z);
  if (it == tau.end()) return phi.tangent(tau.size() - 1, z);
  const std::size_t hi = static_cast<std::size_t>(it - tau.begin());
  return std::min(phi.tangent(hi - 1, z), phi.tangent(hi, z));
}

}  // namespace fairprobe
