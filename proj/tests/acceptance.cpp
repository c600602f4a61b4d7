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


// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion
// numbers as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fairprobe/fairprobe.hpp"
#include "test_util.hpp"

namespace fp = fairprobe;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fp::EstimatorConfig exact_cfg() {
  fp::EstimatorConfig c;
  c.mode = fp::EstimatorMode::exact;
  return c;
}

// Shared random instance suite for criteria 1 and 2.
std::vector<fp::RewardModel> instance_suite() {
  fp::Rng rng(fp::derive_seed({0x5u, 200u}));
  std::vector<fp::RewardModel> out;
  for (int k = 0; k < 200; ++k) {
    const std::size_t M = 1 + rng.below(2);
    const std::size_t A = 1 + rng.below(4);
    out.push_back(fp::testing::random_small_model(M, A, 3, rng));
  }
  return out;
}

Verdict criterion_structure() {
  const auto t0 = Clock::now();
  const auto phi = fp::build_phi();
  const double tol_phi = 2.0 * phi.max_gap();
  const double tau0 = phi.breakpoints.front();
  std::size_t checks = 0, v_g = 0, v_f = 0, v_sub = 0, v_sub_low = 0, v_h = 0, v_dec = 0;
  for (const auto& m : instance_suite()) {
    const std::size_t M = m.num_agents(), A = m.num_arms();
    const auto spec = fp::PolytopeSpec::full(fp::default_capacity(M, A));
    const auto alpha = fp::OverheadFn::linear(A);
    const auto subsets = fp::testing::all_subsets(A);
    std::vector<double> g, f, h, R;
    std::map<std::vector<std::size_t>, std::size_t> index;
    for (const auto& S : subsets) {
      index[S.arms()] = g.size();
      g.push_back(fp::estimate_g(m, S, exact_cfg()).value);
      f.push_back(fp::phi_eval(phi, g.back()));
      h.push_back(fp::compute_h(m, S, spec));
      R.push_back(fp::estimate_R(m, S, alpha, spec, exact_cfg()).value);
    }
    for (std::size_t s = 0; s < subsets.size(); ++s) {
      const double keep = alpha.keep(subsets[s].size());
      ++checks;
      if (R[s] > keep * (g[s] + h[s]) + 1e-9) ++v_dec;
      for (std::size_t t = 0; t < subsets.size(); ++t) {
        if (!fp::testing::is_subset(subsets[s], subsets[t])) continue;
        checks += 3;
        if (g[s] > g[t] + 1e-9) ++v_g;
        if (f[s] > f[t] + 1e-9) ++v_f;
        if (h[s] < h[t] - 1e-6) ++v_h;
        for (std::size_t a = 0; a < A; ++a) {
          if (subsets[t].contains(a)) continue;
          const std::size_t sa = index.at(subsets[s].with(a).arms());
          const std::size_t ta = index.at(subsets[t].with(a).arms());
          ++checks;
          if (f[sa] - f[s] < f[ta] - f[t] - tol_phi) {
            const bool low = std::min({g[s], g[t], g[sa], g[ta]}) < tau0;
            ++(low ? v_sub_low : v_sub);
          }
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  const std::size_t total = v_g + v_f + v_sub + v_sub_low + v_h + v_dec;
  Verdict v;
  v.pass = total == 0 && secs < 300.0;
  v.detail = fmt(
      "%zu checks on 200 instances, %.1fs; violations: g monotone %zu, f_upper monotone %zu, "
      "f_upper submodular %zu (+%zu with some g < tau0; tol %.2e), h anti-monotone %zu, "
      "R <= (1-alpha)(g+h) %zu",
      checks, secs, v_g, v_f, v_sub, v_sub_low, tol_phi, v_h, v_dec);
  return v;
}

Verdict criterion_greedy_bound() {
  const auto t0 = Clock::now();
  const auto phi = fp::build_phi();
  const double e = std::exp(1.0);
  std::size_t cases = 0, violations = 0, nonempty = 0;
  double worst = 1e300;
  for (const auto& m : instance_suite()) {
    const std::size_t M = m.num_agents(), A = m.num_arms();
    const auto spec = fp::PolytopeSpec::full(fp::default_capacity(M, A));
    for (std::size_t I = 1; I <= std::min<std::size_t>(3, A); ++I) {
      const auto alpha = fp::OverheadFn::linear(I);
      const auto oracle = fp::exhaustive_probe_oracle(m, alpha, I, spec, exact_cfg());
      for (double zeta : {1.0, 1.5}) {
        const auto S = fp::greedy_probe(m, alpha, I, zeta, phi, spec, exact_cfg());
        const auto r = fp::estimate_R(m, S, alpha, spec, exact_cfg());
        const double bound = (e - 1) / ((2 * e - 1) * zeta) * oracle.value.value;
        const double slack = 3 * std::max(r.std_error, oracle.value.std_error);
        ++cases;
        if (!S.empty()) ++nonempty;
        if (oracle.value.value > 0) worst = std::min(worst, r.value / oracle.value.value * zeta);
        if (r.value < bound - slack - 1e-12) ++violations;
      }
    }
  }
  Verdict v;
  v.pass = violations == 0;
  v.detail = fmt("%zu cases, %zu violations, %zu non-empty greedy sets, min zeta*R(S_pr)/R(S*) = "
                 "%.4f vs bound %.4f, %.1fs",
                 cases, violations, nonempty, worst, (e - 1) / (2 * e - 1), seconds_since(t0));
  return v;
}

Verdict criterion_phi() {
  const auto t0 = Clock::now();
  const auto phi = fp::build_phi();
  const double tau0 = phi.breakpoints.front();
  std::size_t below = 0, slope_bad = 0;
  double worst_tangency = 0.0;
  const int n = 10000;
  for (int k = 1; k <= n; ++k) {
    const double z = tau0 + (1.0 - tau0) * k / n;
    if (fp::phi_eval(phi, z) < std::log(z)) ++below;
  }
  for (double t : phi.breakpoints) {
    worst_tangency = std::max(worst_tangency, std::abs(fp::phi_eval(phi, t) - std::log(t)));
  }
  for (std::size_t i = 1; i < phi.breakpoints.size(); ++i) {
    if (phi.slope(i) > phi.slope(i - 1)) ++slope_bad;
  }
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = below == 0 && worst_tangency <= 1e-12 && slope_bad == 0 && secs < 1.0;
  v.detail = fmt("grid points below log: %zu/%d, max |phi - log| at breakpoints %.2e, "
                 "slope inversions %zu, max gap %.2e, %.3fs",
                 below, n, worst_tangency, slope_bad, phi.max_gap(), secs);
  return v;
}

Verdict criterion_solver() {
  const auto t0 = Clock::now();
  fp::Rng rng(fp::derive_seed({0x4u}));
  double worst = 0.0;
  std::size_t fails = 0;
  for (auto [dim, count] : {std::pair<std::size_t, int>{2, 100}, {3, 50}}) {
    const auto spec = fp::PolytopeSpec::full(fp::default_capacity(dim, dim));
    for (int k = 0; k < count; ++k) {
      const fp::ValueMatrix v(fp::testing::random_matrix(dim, dim, rng));
      const double ours = fp::solve_nsw(v, spec).value;
      const double ref = fp::solve_nsw_oracle(v, spec, 100).value;
      worst = std::max(worst, std::abs(ours - ref));
      if (std::abs(ours - ref) > 2e-2) ++fails;
    }
  }
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = fails == 0 && secs < 120.0;
  v.detail = fmt("150 instances (100 2x2, 50 3x3), max |solver - grid| %.2e, %zu beyond 2e-2, %.1fs",
                 worst, fails, secs);
  return v;
}

Verdict criterion_coverage() {
  const auto t0 = Clock::now();
  fp::ExperimentConfig c;
  c.M = 4;
  c.A = 4;
  c.T = 2000;
  c.delta = 0.1;
  std::vector<fp::CoverageStats> stats(10);
  fp::detail::parallel_for(10, 0, [&](std::size_t i) {
    const std::uint64_t seed = i + 1;
    auto cfg = fp::online_config(c, seed);
    cfg.track_coverage = true;
    stats[i] = fp::run_ofmup(fp::build_environment(c, seed), cfg, 0.0).coverage;
  });
  std::uint64_t checks = 0, viol = 0;
  double worst = 0.0;
  for (const auto& s : stats) {
    checks += s.checks;
    viol += s.violations;
    worst = std::max(worst, s.rate());
  }
  const double rate = static_cast<double>(viol) / static_cast<double>(checks);
  Verdict v;
  v.pass = rate <= c.delta;
  v.detail = fmt("violation rate %.5f over %llu checkpoints (worst seed %.5f), delta %.2f, %.1fs",
                 rate, static_cast<unsigned long long>(checks), worst, c.delta, seconds_since(t0));
  return v;
}

// Runs for criteria 6 and 7 share environments and benchmarks.
struct RegretSetting {
  fp::ExperimentConfig config;
  std::vector<fp::RewardModel> envs;
  std::vector<fp::OracleResult> oracles;
  double oracle_secs = 0.0;
};

RegretSetting& regret_setting() {
  static std::optional<RegretSetting> cache;
  if (cache) return *cache;
  cache.emplace();
  auto& p = *cache;
  p.config.M = 12;
  p.config.A = 8;
  p.config.T = 3000;
  p.config.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto t0 = Clock::now();
  p.envs.resize(10, fp::make_bernoulli_env(1, 1, 0.5, 0.5, 0));
  p.oracles.resize(10);
  fp::detail::parallel_for(10, 0, [&](std::size_t i) {
    const std::uint64_t seed = p.config.seeds[i];
    p.envs[i] = fp::build_environment(p.config, seed);
    p.oracles[i] = fp::exhaustive_probe_oracle(p.envs[i], p.config.overhead_fn(), p.config.I,
                                               p.config.polytope(),
                                               fp::report_estimator(p.config, seed));
  });
  p.oracle_secs = seconds_since(t0);
  return p;
}

std::map<std::pair<std::string, std::size_t>, std::vector<double>> final_regrets;

// Final cumulative regret per seed for one algorithm and horizon.
const std::vector<double>& regrets(const std::string& alg, std::size_t T) {
  auto key = std::make_pair(alg, T);
  if (auto it = final_regrets.find(key); it != final_regrets.end()) return it->second;
  auto& p = regret_setting();
  fp::ExperimentConfig c = p.config;
  c.T = T;
  std::vector<double> out(10);
  fp::detail::parallel_for(10, 0, [&](std::size_t i) {
    const auto tr = fp::run_algorithm(p.envs[i], fp::online_config(c, c.seeds[i]),
                                      fp::parse_algorithm(alg), p.oracles[i].value.value);
    out[i] = tr.cumulative_regret.back();
  });
  return final_regrets[key] = out;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

Verdict criterion_sublinear() {
  const auto t0 = Clock::now();
  const auto& long_run = regrets("ofmup", 3000);
  const auto& short_run = regrets("ofmup", 1500);
  std::vector<double> ratio(10);
  for (std::size_t i = 0; i < 10; ++i) ratio[i] = long_run[i] / short_run[i];
  const double r = mean(ratio);
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = r <= 1.8 && secs <= 900.0;
  v.detail = fmt("mean regret(3000)/regret(1500) = %.4f over 10 seeds (limit 1.8), "
                 "mean regret %.3f / %.3f, %.1fs incl. %.1fs benchmarks",
                 r, mean(long_run), mean(short_run), secs, regret_setting().oracle_secs);
  return v;
}

Verdict criterion_baselines() {
  const auto t0 = Clock::now();
  const double ofmup = mean(regrets("ofmup", 3000));
  const double greedy = mean(regrets("greedy_pa", 3000));
  const double random = mean(regrets("random_pa", 3000));
  const double non_probing = mean(regrets("non_probing", 3000));
  const double vs_random = 1.0 - ofmup / random;
  const double vs_greedy = 1.0 - ofmup / greedy;
  std::size_t probed_sets = 0;
  for (const auto& o : regret_setting().oracles) probed_sets += o.best.empty() ? 0 : 1;
  Verdict v;
  v.pass = vs_random >= 0.5 && vs_greedy >= 0.3 && ofmup < greedy && greedy < random;
  v.detail = fmt("mean regret ofmup %.3f, greedy_pa %.3f, random_pa %.3f (non_probing %.3f); "
                 "reduction vs random %.1f%% (need 50%%), vs greedy %.1f%% (need 30%%); "
                 "benchmark probes on %zu/10 seeds; %.1fs",
                 ofmup, greedy, random, non_probing, 100 * vs_random, 100 * vs_greedy,
                 probed_sets, seconds_since(t0));
  return v;
}

Verdict criterion_determinism() {
  const auto t0 = Clock::now();
  fp::ExperimentConfig c;
  c.M = 6;
  c.A = 4;
  c.T = 500;
  c.seeds = {1, 2, 3};
  c.random_probe_size = 1;
  c.stride = 1;
  auto csv = [&](std::size_t threads) {
    fp::ExperimentConfig x = c;
    x.threads = threads;
    std::ostringstream out;
    fp::emit_csv(fp::run_experiment(x).rows, out);
    return out.str();
  };
  const std::string a = csv(0), b = csv(0), d = csv(1);
  Verdict v;
  v.pass = a == b && a == d && !a.empty();
  v.detail = fmt("%zu bytes; repeat %s, single-thread %s; %.1fs", a.size(),
                 a == b ? "identical" : "DIFFERENT", a == d ? "identical" : "DIFFERENT",
                 seconds_since(t0));
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"structural properties", criterion_structure},
      {"greedy approximation bound", criterion_greedy_bound},
      {"phi correctness", criterion_phi},
      {"solver equivalence", criterion_solver},
      {"concentration coverage", criterion_coverage},
      {"sublinear regret", criterion_sublinear},
      {"baseline ordering", criterion_baselines},
      {"determinism", criterion_determinism},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!wanted.empty() && !wanted.count(id)) continue;
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << id << " " << (v.pass ? "PASS" : "FAIL") << "  "
              << criteria[k].first << ": " << v.detail << std::endl;
    failed += v.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
