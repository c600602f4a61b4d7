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
#include <optional>
#include <string>
#include <vector>

#include "fairprobe/allocation.hpp"
#include "fairprobe/errors.hpp"
#include "fairprobe/model.hpp"
#include "fairprobe/nsw_solver.hpp"
#include "fairprobe/piecewise_log.hpp"
#include "fairprobe/probing.hpp"
#include "fairprobe/rng.hpp"

namespace fairprobe {

// Empirical-Bernstein radius. N = 0 gives +inf.
inline double confidence_width(double mu_hat, std::uint64_t N, std::size_t M, std::size_t A,
                               std::size_t T, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("confidence_width: delta outside (0,1)");
  if (N == 0) return std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(N);
  const double log_term = std::log(2.0 * static_cast<double>(M) * static_cast<double>(A) *
                                   static_cast<double>(T) / delta);
  const double var = std::max(0.0, mu_hat - mu_hat * mu_hat);
  return std::sqrt(2.0 * var * log_term / n) + log_term / (3.0 * n);
}

struct PairStats {
  std::uint64_t count = 0;
  double mu_hat = 0.0;
  double width = std::numeric_limits<double>::infinity();
  double ucb = 1.0;
  std::map<double, std::uint64_t> histogram;
};

class OnlineState {
 public:
  OnlineState(std::size_t M, std::size_t A, std::size_t T, double delta)
      : M_(M), A_(A), T_(T), delta_(delta), stats_(M * A) {
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("online state: delta outside (0,1)");
  }

  std::size_t num_agents() const noexcept { return M_; }
  std::size_t num_arms() const noexcept { return A_; }
  std::size_t horizon() const noexcept { return T_; }
  double delta() const noexcept { return delta_; }
  std::size_t t = 0;  // rounds completed

  const PairStats& stats(std::size_t j, std::size_t a) const { return stats_[j * A_ + a]; }

  void observe(std::size_t j, std::size_t a, double x) {
    PairStats& s = stats_[j * A_ + a];
    ++s.histogram[x];
    ++s.count;
    double sum = 0.0;
    for (const auto& [v, n] : s.histogram) sum += v * static_cast<double>(n);
    s.mu_hat = sum / static_cast<double>(s.count);
    s.width = confidence_width(s.mu_hat, s.count, M_, A_, T_, delta_);
    s.ucb = std::min(s.mu_hat + s.width, 1.0);
  }

  Matrix mean_matrix() const {
    Matrix m(M_, A_);
    for (std::size_t i = 0; i < stats_.size(); ++i) m.data()[i] = stats_[i].mu_hat;
    return m;
  }

  Matrix ucb_matrix() const {
    Matrix m(M_, A_);
    for (std::size_t i = 0; i < stats_.size(); ++i) m.data()[i] = stats_[i].ucb;
    return m;
  }

  // Histograms as distributions. Requires every pair observed.
  RewardModel empirical_model() const {
    std::vector<DiscreteDistribution> dists;
    dists.reserve(stats_.size());
    for (const PairStats& s : stats_) {
      if (s.count == 0) throw DomainError("empirical model: unobserved agent-arm pair");
      std::vector<double> support, probs;
      for (const auto& [v, n] : s.histogram) {
        support.push_back(v);
        probs.push_back(static_cast<double>(n) / static_cast<double>(s.count));
      }
      dists.emplace_back(std::move(support), std::move(probs));
    }
    return RewardModel(M_, A_, std::move(dists));
  }

 private:
  std::size_t M_, A_, T_;
  double delta_;
  std::vector<PairStats> stats_;
};

enum class AlgorithmKind { ofmup, non_probing, random_pa, greedy_pa };

inline std::string to_string(AlgorithmKind k) {
  switch (k) {
    case AlgorithmKind::ofmup: return "ofmup";
    case AlgorithmKind::non_probing: return "non_probing";
    case AlgorithmKind::random_pa: return "random_pa";
    case AlgorithmKind::greedy_pa: return "greedy_pa";
  }
  return "unknown";
}

inline AlgorithmKind parse_algorithm(const std::string& s) {
  if (s == "ofmup") return AlgorithmKind::ofmup;
  if (s == "non_probing") return AlgorithmKind::non_probing;
  if (s == "random_pa") return AlgorithmKind::random_pa;
  if (s == "greedy_pa") return AlgorithmKind::greedy_pa;
  throw DomainError("unknown algorithm '" + s +
                    "'; expected ofmup, non_probing, random_pa or greedy_pa");
}

struct OnlineConfig {
  std::size_t T = 3000;
  std::size_t I = 2;
  OverheadFn alpha = OverheadFn::linear(2);
  double zeta = 1.0;
  double delta = 0.1;
  std::uint64_t seed = 0;
  PolytopeSpec spec;
  PiecewiseLogUpper phi = build_phi();
  EstimatorConfig estimator;  // seed replaced per round
  GreedyOptions greedy;
  std::optional<std::size_t> random_probe_size;  // default floor(I / 2)
  bool track_coverage = false;
};

struct RoundRecord {
  std::size_t t = 0;  // 1-based
  bool warm = false;
  ProbeSet S;
  Matrix pi;
  bool restricted = false;
  std::vector<std::optional<std::size_t>> pulls;  // per agent
  std::vector<double> rewards;                    // per agent, 0 without a pull
  double effective_reward = 0.0;
  std::vector<double> expected_rewards;           // sum_a pi(j,a) mu(j,a)
};

struct CoverageStats {
  std::uint64_t checks = 0;
  std::uint64_t violations = 0;
  double rate() const {
    return checks == 0 ? 0.0 : static_cast<double>(violations) / static_cast<double>(checks);
  }
};

struct Trajectory {
  AlgorithmKind kind = AlgorithmKind::ofmup;
  double benchmark = 0.0;
  std::vector<RoundRecord> rounds;
  std::vector<double> cumulative_regret;
  std::vector<double> nsw_geometric_mean;  // cumulative sum of eff^(1/M)
  CoverageStats coverage;
};

namespace detail {

inline void validate_online(const RewardModel& env, const OnlineConfig& cfg) {
  const std::size_t M = env.num_agents(), A = env.num_arms();
  if (cfg.T <= M * A) {
    throw ConfigError("T", "T = " + std::to_string(cfg.T) + " must exceed M*A = " +
                               std::to_string(M * A));
  }
  if (cfg.I > A) throw ConfigError("I", "probe budget I exceeds arm count");
  if (cfg.alpha.budget() != cfg.I) {
    throw ConfigError("overhead", "overhead table must cover exactly 0..I");
  }
  if (!(cfg.zeta >= 1.0)) throw ConfigError("zeta", "zeta must be >= 1");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ConfigError("delta", "delta outside (0,1)");
  if (cfg.spec.num_arms() != A) throw ConfigError("capacity", "capacity length differs from A");
  cfg.spec.validate(M);
}

// Per-agent expected reward and NSW under the given value matrix.
inline void score_round(const Matrix& values, RoundRecord& rec, double keep) {
  rec.expected_rewards = agent_utilities(values, rec.pi);
  double prod = 1.0;
  for (double u : rec.expected_rewards) prod *= std::max(u, 0.0);
  rec.effective_reward = keep * prod;
}

// One arm per agent from a shuffled list of capacity slots.
inline Matrix random_assignment(const PolytopeSpec& spec, std::size_t M, Rng& rng) {
  std::vector<std::size_t> slots;
  for (std::size_t a = 0; a < spec.num_arms(); ++a) {
    if (!spec.allowed[a]) continue;
    const auto k = static_cast<std::size_t>(std::floor(spec.capacity[a] + 1e-12));
    slots.insert(slots.end(), k, a);
  }
  if (slots.size() < M) {
    throw InfeasibleError("random assignment: " + std::to_string(slots.size()) +
                          " integral capacity slots for " + std::to_string(M) + " agents");
  }
  rng.shuffle(slots);
  Matrix pi(M, spec.num_arms());
  for (std::size_t j = 0; j < M; ++j) pi(j, slots[j]) = 1.0;
  return pi;
}

}  // namespace detail

// Rounds 1..M*A: agent (t-1) mod M pulls arm floor((t-1)/M).
inline std::vector<RoundRecord> warm_start(OnlineState& state, const RewardModel& env,
                                           Rng& rng) {
  const std::size_t M = env.num_agents(), A = env.num_arms();
  std::vector<RoundRecord> out;
  out.reserve(M * A);
  for (std::size_t t = 1; t <= M * A; ++t) {
    const std::size_t j = (t - 1) % M, a = (t - 1) / M;
    RoundRecord rec;
    rec.t = t;
    rec.warm = true;
    rec.S = ProbeSet({a});
    rec.pi = Matrix(M, A);
    rec.pi(j, a) = 1.0;
    rec.restricted = true;
    rec.pulls.assign(M, std::nullopt);
    rec.rewards.assign(M, 0.0);
    const double x = env.dist(j, a).sample(rng);
    rec.pulls[j] = a;
    rec.rewards[j] = x;
    state.observe(j, a, x);
    detail::score_round(env.means(), rec, 1.0);
    state.t = t;
    out.push_back(std::move(rec));
  }
  return out;
}

// One main-loop round for any algorithm kind. env_rng drives reward draws
// and pulls; alg_rng drives the random probe sets and assignments.
inline RoundRecord online_step(OnlineState& state, const RewardModel& env,
                               const OnlineConfig& cfg, AlgorithmKind kind, Rng& env_rng,
                               Rng& alg_rng) {
  const std::size_t M = env.num_agents(), A = env.num_arms();
  const std::size_t t = state.t + 1;
  RoundRecord rec;
  rec.t = t;

  // (a) probe set.
  if (kind == AlgorithmKind::ofmup || kind == AlgorithmKind::greedy_pa) {
    EstimatorConfig est = cfg.estimator;
    est.seed = derive_seed({cfg.seed, 0x9b0bULL, static_cast<std::uint64_t>(t)});
    rec.S = greedy_probe(state.empirical_model(), cfg.alpha, cfg.I, cfg.zeta, cfg.phi,
                         cfg.spec, est, cfg.greedy);
  } else if (kind == AlgorithmKind::random_pa) {
    const std::size_t k = std::min(cfg.random_probe_size.value_or(cfg.I / 2), std::min(cfg.I, A));
    std::vector<std::size_t> arms(A);
    for (std::size_t a = 0; a < A; ++a) arms[a] = a;
    alg_rng.shuffle(arms);
    arms.resize(k);
    rec.S = ProbeSet(std::move(arms), cfg.I);
  } else {
    rec.S = ProbeSet(std::vector<std::size_t>{}, cfg.I);
  }

  // (b) probe: every agent observes every probed arm.
  Matrix realized(M, A);
  for (std::size_t a : rec.S.arms()) {
    for (std::size_t j = 0; j < M; ++j) {
      realized(j, a) = env.dist(j, a).sample(env_rng);
      state.observe(j, a, realized(j, a));
    }
  }

  // (c) allocation.
  if (kind == AlgorithmKind::ofmup || kind == AlgorithmKind::non_probing) {
    const ValueMatrix v = mixed_values(state.ucb_matrix(), realized, rec.S, ValueSource::ucb);
    NswSolution sol = solve_nsw(v, cfg.spec);
    rec.pi = std::move(sol.policy.pi);
  } else {
    rec.pi = detail::random_assignment(cfg.spec, M, alg_rng);
  }
  rec.restricted = cfg.spec.row_mode == RowMode::at_most_one;

  // (d) pulls; a pull of a probed arm returns the probed value.
  rec.pulls.assign(M, std::nullopt);
  rec.rewards.assign(M, 0.0);
  std::vector<double> row(A + 1);
  for (std::size_t j = 0; j < M; ++j) {
    double mass = 0.0;
    for (std::size_t a = 0; a < A; ++a) {
      row[a] = std::max(rec.pi(j, a), 0.0);
      mass += row[a];
    }
    row[A] = std::max(0.0, 1.0 - mass);
    if (!rec.restricted) row[A] = 0.0;
    const std::size_t a = env_rng.categorical(row);
    if (a == A) continue;
    rec.pulls[j] = a;
    if (rec.S.contains(a)) {
      rec.rewards[j] = realized(j, a);
    } else {
      rec.rewards[j] = env.dist(j, a).sample(env_rng);
      state.observe(j, a, rec.rewards[j]);
    }
  }

  // Effective reward under the true means. When pi reacted to the probe
  // outcome the realized draw stands in for the expectation.
  const double keep = cfg.alpha.keep(rec.S.size());
  if (kind == AlgorithmKind::ofmup && !rec.S.empty()) {
    const ValueMatrix truth = mixed_values(env.means(), realized, rec.S);
    detail::score_round(truth.values(), rec, keep);
    rec.expected_rewards = agent_utilities(env.means(), rec.pi);
  } else {
    detail::score_round(env.means(), rec, keep);
  }
  state.t = t;
  return rec;
}

inline Trajectory run_algorithm(const RewardModel& env, const OnlineConfig& cfg,
                                AlgorithmKind kind, double benchmark) {
  detail::validate_online(env, cfg);
  const std::size_t M = env.num_agents(), A = env.num_arms();
  Trajectory traj;
  traj.kind = kind;
  traj.benchmark = benchmark;
  traj.rounds.reserve(cfg.T);
  Rng env_rng(derive_seed({cfg.seed, 0xe17ULL}));
  Rng alg_rng(derive_seed({cfg.seed, 0xa16ULL, static_cast<std::uint64_t>(kind)}));
  OnlineState state(M, A, cfg.T, cfg.delta);

  for (RoundRecord& r : warm_start(state, env, env_rng)) traj.rounds.push_back(std::move(r));
  while (traj.rounds.size() < cfg.T) {
    if (cfg.track_coverage) {
      for (std::size_t j = 0; j < M; ++j) {
        for (std::size_t a = 0; a < A; ++a) {
          const PairStats& s = state.stats(j, a);
          ++traj.coverage.checks;
          if (std::abs(env.mean(j, a) - s.mu_hat) > s.width) ++traj.coverage.violations;
        }
      }
    }
    traj.rounds.push_back(online_step(state, env, cfg, kind, env_rng, alg_rng));
  }

  double regret = 0.0, geo = 0.0;
  const double inv_m = 1.0 / static_cast<double>(M);
  for (const RoundRecord& r : traj.rounds) {
    regret += benchmark - r.effective_reward;
    geo += std::pow(std::max(r.effective_reward, 0.0), inv_m);
    traj.cumulative_regret.push_back(regret);
    traj.nsw_geometric_mean.push_back(geo);
  }
  return traj;
}

inline Trajectory run_ofmup(const RewardModel& env, const OnlineConfig& cfg, double benchmark) {
  return run_algorithm(env, cfg, AlgorithmKind::ofmup, benchmark);
}

inline Trajectory run_baseline(const RewardModel& env, const OnlineConfig& cfg,
                               AlgorithmKind kind, double benchmark) {
  if (kind == AlgorithmKind::ofmup) throw DomainError("run_baseline: ofmup is not a baseline");
  return run_algorithm(env, cfg, kind, benchmark);
}

}  // namespace fairprobe
