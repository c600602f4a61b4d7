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
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "fairprobe/allocation.hpp"
#include "fairprobe/errors.hpp"
#include "fairprobe/model.hpp"
#include "fairprobe/nsw_solver.hpp"
#include "fairprobe/piecewise_log.hpp"
#include "fairprobe/rng.hpp"

namespace fairprobe {

// exact enumerates joint outcomes and fails past the outcome limit;
// automatic falls back to sampling there.
enum class EstimatorMode { exact, monte_carlo, automatic };

struct EstimatorConfig {
  EstimatorMode mode = EstimatorMode::automatic;
  std::size_t samples = 2000;
  std::uint64_t seed = 0;
  double exact_outcome_limit = 1e6;
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t sample_count = 0;  // outcomes enumerated or draws averaged
  bool exact = true;
};

struct ProbeEvaluation {
  double g_hat = 0.0;
  double h_val = 0.0;
  double f_upper = 0.0;
  double R_hat = 0.0;
  std::size_t sample_count = 0;
  double std_error = 0.0;
};

// Scale of the greedy probing sort key. log: (1 - alpha) * f_upper, compared
// against h(empty). linear: (1 - alpha) * exp(f_upper).
enum class SurrogateScale { log, linear };

namespace detail {

// Number of joint outcomes of the probed cells, saturating at +inf.
inline double outcome_count(const RewardModel& model, const ProbeSet& S) {
  double n = 1.0;
  for (std::size_t a : S.arms()) {
    for (std::size_t j = 0; j < model.num_agents(); ++j) {
      n *= static_cast<double>(model.dist(j, a).size());
    }
  }
  return n;
}

inline bool use_exact(const RewardModel& model, const ProbeSet& S,
                      const EstimatorConfig& cfg, const char* op) {
  const double n = outcome_count(model, S);
  switch (cfg.mode) {
    case EstimatorMode::exact:
      if (n > cfg.exact_outcome_limit) {
        throw CostGuardError(std::string(op) + ": exact mode needs " +
                             std::to_string(n) + " outcomes, limit " +
                             std::to_string(cfg.exact_outcome_limit) +
                             "; use monte_carlo mode");
      }
      return true;
    case EstimatorMode::monte_carlo:
      return false;
    case EstimatorMode::automatic:
      return n <= cfg.exact_outcome_limit;
  }
  return false;
}

inline void require_samples(const EstimatorConfig& cfg, const char* op) {
  if (cfg.samples == 0) throw DomainError(std::string(op) + ": samples must be positive");
}

// Full M x A reward draw for sample k. Every probe set reads the same
// draws, so comparisons across sets share their noise.
inline void common_draw(const RewardModel& model, std::uint64_t seed, std::size_t k,
                        Matrix& out) {
  Rng rng(derive_seed({seed, static_cast<std::uint64_t>(k)}));
  for (std::size_t a = 0; a < model.num_arms(); ++a) {
    for (std::size_t j = 0; j < model.num_agents(); ++j) {
      out(j, a) = model.dist(j, a).sample(rng);
    }
  }
}

// E[max_{a in S} X_a] for independent discrete X_a.
inline double expected_max(const RewardModel& model, std::size_t j, const ProbeSet& S) {
  std::vector<double> points;
  for (std::size_t a : S.arms()) {
    const auto& s = model.dist(j, a).support();
    points.insert(points.end(), s.begin(), s.end());
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  // E[Y] = sum over consecutive points of (x_{k+1} - x_k) P(Y > x_k) plus
  // the lowest point, since Y >= 0 and Y >= points[0] surely.
  double e = points.front();
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    double below = 1.0;
    for (std::size_t a : S.arms()) below *= model.dist(j, a).cdf(points[k]);
    e += (points[k + 1] - points[k]) * (1.0 - below);
  }
  return e;
}

struct Accumulator {
  double sum = 0.0, sum_sq = 0.0;
  std::size_t n = 0;
  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++n;
  }
  Estimate finish() const {
    Estimate e;
    e.exact = false;
    e.sample_count = n;
    e.value = sum / static_cast<double>(n);
    if (n > 1) {
      const double var =
          std::max(0.0, (sum_sq - sum * e.value) / static_cast<double>(n - 1));
      e.std_error = std::sqrt(var / static_cast<double>(n));
    }
    return e;
  }
};

}  // namespace detail

// g(S): expected NSW when each agent takes its best realized probed arm.
// Agents are independent, so the exact value is prod_j E[max_{a in S} R_ja].
inline Estimate estimate_g(const RewardModel& model, const ProbeSet& S,
                           const EstimatorConfig& cfg = {}) {
  S.mask(model.num_arms());
  if (S.empty()) return Estimate{0.0, 0.0, 1, true};
  const std::size_t M = model.num_agents();
  if (cfg.mode != EstimatorMode::monte_carlo) {
    if (cfg.mode == EstimatorMode::exact) detail::use_exact(model, S, cfg, "estimate_g");
    double g = 1.0;
    for (std::size_t j = 0; j < M; ++j) g *= detail::expected_max(model, j, S);
    return Estimate{std::clamp(g, 0.0, 1.0), 0.0,
                    static_cast<std::size_t>(
                        std::min(detail::outcome_count(model, S), 1e18)),
                    true};
  }
  detail::require_samples(cfg, "estimate_g");
  Matrix draw(M, model.num_arms());
  detail::Accumulator acc;
  for (std::size_t k = 0; k < cfg.samples; ++k) {
    detail::common_draw(model, cfg.seed, k, draw);
    double prod = 1.0;
    for (std::size_t j = 0; j < M; ++j) {
      double best = 0.0;
      for (std::size_t a : S.arms()) best = std::max(best, draw(j, a));
      prod *= best;
    }
    acc.add(prod);
  }
  return acc.finish();
}

// Polytope over the arms outside S. Rows must sum to one when the
// remaining capacity allows it, otherwise at most one.
inline PolytopeSpec complement_spec(const PolytopeSpec& spec, const ProbeSet& S,
                                    std::size_t num_agents) {
  PolytopeSpec out = spec;
  for (std::size_t a : S.arms()) out.allowed.at(a) = false;
  if (out.row_mode == RowMode::exact_one &&
      static_cast<double>(num_agents) > out.allowed_capacity() + 1e-12) {
    out.row_mode = RowMode::at_most_one;
  }
  return out;
}

// h(S): best NSW on means using only arms outside S.
inline NswSolution compute_h_solution(const RewardModel& model, const ProbeSet& S,
                                      const PolytopeSpec& spec,
                                      const NswSolveOptions& opts = {}) {
  S.mask(model.num_arms());
  const PolytopeSpec sub = complement_spec(spec, S, model.num_agents());
  if (std::none_of(sub.allowed.begin(), sub.allowed.end(), [](bool b) { return b; })) {
    NswSolution empty;
    empty.policy = AllocationPolicy{Matrix(model.num_agents(), model.num_arms()),
                                    spec.capacity, true};
    return empty;
  }
  return solve_nsw(ValueMatrix(model.means()), sub, opts);
}

inline double compute_h(const RewardModel& model, const ProbeSet& S,
                        const PolytopeSpec& spec, const NswSolveOptions& opts = {}) {
  return compute_h_solution(model, S, spec, opts).value;
}

// Means everywhere, with realized values on the probed columns.
inline ValueMatrix mixed_values(const Matrix& means, const Matrix& realized,
                                const ProbeSet& S, ValueSource rest = ValueSource::mean) {
  Matrix v = means;
  std::vector<ValueSource> src(means.cols(), rest);
  for (std::size_t a : S.arms()) {
    src[a] = ValueSource::realized;
    for (std::size_t j = 0; j < means.rows(); ++j) v(j, a) = realized(j, a);
  }
  return ValueMatrix(std::move(v), std::move(src));
}

// R(S) = (1 - alpha(|S|)) E_R[max_pi NSW(mixed values, pi)].
inline Estimate estimate_R(const RewardModel& model, const ProbeSet& S,
                           const OverheadFn& alpha, const PolytopeSpec& spec,
                           const EstimatorConfig& cfg = {},
                           const NswSolveOptions& solve_opts = {}) {
  const std::size_t M = model.num_agents();
  const std::size_t A = model.num_arms();
  S.mask(A);
  const double keep = alpha.keep(S.size());
  if (keep == 0.0) return Estimate{0.0, 0.0, 0, true};
  if (S.empty()) {
    return Estimate{keep * compute_h(model, S, spec, solve_opts), 0.0, 1, true};
  }

  NswSolveOptions opts = solve_opts;
  Matrix realized(M, A);
  auto solve_at = [&]() {
    const NswSolution sol = solve_nsw(mixed_values(model.means(), realized, S), spec, opts);
    opts.initial = sol.policy.pi;
    return sol.value;
  };

  if (detail::use_exact(model, S, cfg, "estimate_R")) {
    // Odometer over the M*|S| probed cells.
    struct Cell {
      std::size_t j, a;
      const DiscreteDistribution* d;
    };
    std::vector<Cell> cells;
    for (std::size_t a : S.arms()) {
      for (std::size_t j = 0; j < M; ++j) cells.push_back({j, a, &model.dist(j, a)});
    }
    std::vector<std::size_t> idx(cells.size(), 0);
    double total = 0.0;
    std::size_t count = 0;
    while (true) {
      double w = 1.0;
      for (std::size_t c = 0; c < cells.size(); ++c) {
        w *= cells[c].d->probs()[idx[c]];
        realized(cells[c].j, cells[c].a) = cells[c].d->support()[idx[c]];
      }
      if (w > 0.0) total += w * solve_at();
      ++count;
      std::size_t c = 0;
      for (; c < cells.size(); ++c) {
        if (++idx[c] < cells[c].d->size()) break;
        idx[c] = 0;
      }
      if (c == cells.size()) break;
    }
    return Estimate{keep * std::clamp(total, 0.0, 1.0), 0.0, count, true};
  }

  detail::require_samples(cfg, "estimate_R");
  detail::Accumulator acc;
  for (std::size_t k = 0; k < cfg.samples; ++k) {
    detail::common_draw(model, cfg.seed, k, realized);
    acc.add(solve_at());
  }
  Estimate e = acc.finish();
  e.value *= keep;
  e.std_error *= keep;
  return e;
}

// g, h, f_upper and R for one probe set.
inline ProbeEvaluation evaluate_probe_set(const RewardModel& model, const ProbeSet& S,
                                          const OverheadFn& alpha, const PolytopeSpec& spec,
                                          const PiecewiseLogUpper& phi,
                                          const EstimatorConfig& cfg = {}) {
  ProbeEvaluation ev;
  const Estimate g = estimate_g(model, S, cfg);
  ev.g_hat = g.value;
  ev.h_val = compute_h(model, S, spec);
  ev.f_upper = phi_eval(phi, std::min(g.value, phi.x_max));
  const Estimate r = estimate_R(model, S, alpha, spec, cfg);
  ev.R_hat = r.value;
  ev.std_error = std::max(g.std_error, r.std_error);
  ev.sample_count = r.sample_count;
  return ev;
}

struct GreedyOptions {
  SurrogateScale scale = SurrogateScale::log;
  NswSolveOptions solve;
};

struct GreedyTrace {
  std::vector<ProbeSet> chain;        // S_0, ..., S_I
  std::vector<double> g;              // g(S_i)
  std::vector<double> f_upper;        // phi(g(S_i))
  std::vector<double> keys;           // sort keys
  std::vector<std::size_t> order;     // chain indices by key, descending
  double h_empty = 0.0;
  std::map<std::size_t, Estimate> R;  // R(S_i) where it was needed
  std::string outcome;                // how the loop ended
};

// Greedy probing: greedy chain on f_upper, then screening of the chain.
inline ProbeSet greedy_probe(const RewardModel& model, const OverheadFn& alpha,
                             std::size_t I, double zeta, const PiecewiseLogUpper& phi,
                             const PolytopeSpec& spec, const EstimatorConfig& cfg = {},
                             const GreedyOptions& opts = {}, GreedyTrace* trace = nullptr) {
  const std::size_t A = model.num_arms();
  if (!(zeta >= 1.0)) throw DomainError("greedy_probe: zeta must be >= 1");
  if (I > A) {
    throw DomainError("greedy_probe: budget " + std::to_string(I) + " exceeds " +
                      std::to_string(A) + " arms");
  }
  if (alpha.budget() != I) {
    throw DomainError("greedy_probe: overhead table covers budget " +
                      std::to_string(alpha.budget()) + ", expected " + std::to_string(I));
  }
  GreedyTrace local;
  GreedyTrace& tr = trace ? *trace : local;
  tr = GreedyTrace{};

  auto f_of = [&](const ProbeSet& S, double* g_out) {
    const double g = estimate_g(model, S, cfg).value;
    if (g_out) *g_out = g;
    return phi_eval(phi, std::min(g, phi.x_max));
  };

  ProbeSet S(std::vector<std::size_t>{}, I);
  double g0 = 0.0;
  tr.chain.push_back(S);
  tr.f_upper.push_back(f_of(S, &g0));
  tr.g.push_back(g0);
  for (std::size_t i = 1; i <= I; ++i) {
    std::optional<std::size_t> best;
    double best_f = -std::numeric_limits<double>::infinity(), best_g = 0.0;
    for (std::size_t a = 0; a < A; ++a) {
      if (S.contains(a)) continue;
      double g = 0.0;
      const double f = f_of(S.with(a), &g);
      if (!best || f > best_f) {
        best = a;
        best_f = f;
        best_g = g;
      }
    }
    S = S.with(*best);
    tr.chain.push_back(S);
    tr.f_upper.push_back(best_f);
    tr.g.push_back(best_g);
  }

  for (std::size_t i = 0; i <= I; ++i) {
    const double keep = alpha.keep(i);
    tr.keys.push_back(opts.scale == SurrogateScale::log ? keep * tr.f_upper[i]
                                                        : keep * std::exp(tr.f_upper[i]));
  }
  tr.order.resize(I + 1);
  std::iota(tr.order.begin(), tr.order.end(), std::size_t{0});
  std::stable_sort(tr.order.begin(), tr.order.end(),
                   [&](std::size_t x, std::size_t y) { return tr.keys[x] > tr.keys[y]; });

  tr.h_empty = compute_h(model, ProbeSet(), spec, opts.solve);
  for (std::size_t i : tr.order) {
    if (tr.keys[i] < tr.h_empty) {
      tr.outcome = "below h(empty) at S_" + std::to_string(i);
      return ProbeSet(std::vector<std::size_t>{}, I);
    }
    if (std::isfinite(zeta)) {
      const Estimate r = estimate_R(model, tr.chain[i], alpha, spec, cfg, opts.solve);
      tr.R.emplace(i, r);
      if (tr.keys[i] > zeta * r.value) continue;
    }
    tr.outcome = "selected S_" + std::to_string(i);
    return tr.chain[i];
  }
  tr.outcome = "all candidates skipped";
  return ProbeSet(std::vector<std::size_t>{}, I);
}

struct OracleResult {
  ProbeSet best;
  Estimate value;
  std::vector<std::pair<ProbeSet, Estimate>> evaluated;
};

inline double binomial(std::size_t n, std::size_t k) {
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return c;
}

// Maximizes R(S) over all |S| <= I by enumeration, smallest sets first.
inline OracleResult exhaustive_probe_oracle(const RewardModel& model,
                                            const OverheadFn& alpha, std::size_t I,
                                            const PolytopeSpec& spec,
                                            const EstimatorConfig& cfg = {},
                                            double set_limit = 1e4) {
  const std::size_t A = model.num_arms();
  if (I > A) throw DomainError("oracle: budget exceeds arm count");
  double sets = 0.0;
  for (std::size_t k = 0; k <= I; ++k) sets += binomial(A, k);
  if (sets > set_limit) {
    throw CostGuardError("oracle: " + std::to_string(static_cast<long long>(sets)) +
                         " probe sets exceed limit " + std::to_string(set_limit) +
                         "; reduce A or I");
  }
  OracleResult res;
  EstimatorConfig c = cfg;
  if (c.mode == EstimatorMode::exact) c.mode = EstimatorMode::automatic;
  bool first = true;
  for (std::size_t k = 0; k <= I; ++k) {
    std::vector<bool> pick(A, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
    do {
      std::vector<std::size_t> arms;
      for (std::size_t a = 0; a < A; ++a) {
        if (pick[a]) arms.push_back(a);
      }
      ProbeSet S(std::move(arms), I);
      const Estimate e = estimate_R(model, S, alpha, spec, c);
      if (first || e.value > res.value.value) {
        res.best = S;
        res.value = e;
        first = false;
      }
      res.evaluated.emplace_back(std::move(S), e);
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return res;
}

}  // namespace fairprobe
