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
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "fairprobe/allocation.hpp"
#include "fairprobe/errors.hpp"
#include "fairprobe/model.hpp"
#include "fairprobe/online.hpp"
#include "fairprobe/piecewise_log.hpp"
#include "fairprobe/probing.hpp"
#include "fairprobe/rng.hpp"
#include "fairprobe/taxi.hpp"

namespace fairprobe {

struct EnvironmentSpec {
  std::string kind = "bernoulli";  // bernoulli | discrete | taxi
  double mu_low = 0.3;
  double mu_high = 0.8;
  std::vector<double> support = {0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  std::string csv;         // taxi pickups
  double grid_step = 0.01;

  bool operator==(const EnvironmentSpec&) const = default;
};

struct ExperimentConfig {
  EnvironmentSpec environment;
  std::size_t M = 12;
  std::size_t A = 8;
  std::size_t T = 3000;
  std::size_t I = 2;
  double delta = 0.1;
  double zeta = 1.0;  // +inf disables the screening step
  std::optional<std::vector<double>> overhead;  // absent: linear k / I
  std::optional<std::vector<double>> capacity;  // absent: max(1, ceil(M / A))
  std::vector<std::string> algorithms = {"ofmup", "non_probing", "random_pa", "greedy_pa"};
  std::vector<std::uint64_t> seeds = {1};
  std::uint64_t master_seed = 0;
  std::size_t greedy_samples = 2000;
  std::size_t report_samples = 20000;
  std::string surrogate_scale = "log";
  std::optional<std::size_t> random_probe_size;
  std::size_t phi_breakpoints = 513;
  double phi_tau0 = 1e-4;
  std::size_t stride = 10;
  std::size_t threads = 0;  // 0: hardware concurrency
  std::string output_dir = "results";

  bool operator==(const ExperimentConfig&) const = default;

  OverheadFn overhead_fn() const {
    return overhead ? OverheadFn(*overhead) : OverheadFn::linear(I);
  }

  PolytopeSpec polytope() const {
    std::vector<double> cap = capacity ? *capacity : default_capacity(M, A);
    if (cap.size() == 1 && A > 1) cap.assign(A, cap.front());
    return PolytopeSpec::full(std::move(cap));
  }
};

// Checks every invariant; throws ConfigError naming the field.
inline void validate(const ExperimentConfig& c) {
  const auto& env = c.environment;
  if (env.kind != "bernoulli" && env.kind != "discrete" && env.kind != "taxi") {
    throw ConfigError("environment.kind", "unknown environment kind '" + env.kind +
                                              "'; allowed: bernoulli, discrete, taxi");
  }
  if (env.kind == "bernoulli" &&
      !(0.0 <= env.mu_low && env.mu_low <= env.mu_high && env.mu_high <= 1.0)) {
    throw ConfigError("environment.mu_low", "need 0 <= mu_low <= mu_high <= 1");
  }
  if (env.kind == "discrete") {
    if (env.support.empty()) throw ConfigError("environment.support", "support is empty");
    for (double x : env.support) {
      if (!(x >= 0.0 && x <= 1.0)) {
        throw ConfigError("environment.support", "support values must lie in [0,1]");
      }
    }
  }
  if (env.kind == "taxi") {
    if (env.csv.empty()) throw ConfigError("environment.csv", "taxi environment needs a csv path");
    if (!(env.grid_step > 0.0)) throw ConfigError("environment.grid_step", "must be positive");
  }
  if (c.M == 0) throw ConfigError("M", "M must be positive");
  if (c.A == 0) throw ConfigError("A", "A must be positive");
  if (c.T <= c.M * c.A) {
    throw ConfigError("T", "T = " + std::to_string(c.T) + " must exceed M*A = " +
                               std::to_string(c.M * c.A));
  }
  if (c.I > c.A) throw ConfigError("I", "I = " + std::to_string(c.I) + " exceeds A");
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw ConfigError("delta", "delta must lie in (0,1)");
  if (!(c.zeta >= 1.0)) throw ConfigError("zeta", "zeta must be >= 1");
  if (c.overhead) {
    if (c.overhead->size() != c.I + 1) {
      throw ConfigError("overhead", "overhead table needs I+1 = " + std::to_string(c.I + 1) +
                                        " entries");
    }
    try {
      OverheadFn check(*c.overhead);
    } catch (const DomainError& e) {
      throw ConfigError("overhead", e.what());
    }
  }
  if (c.capacity) {
    if (c.capacity->size() != 1 && c.capacity->size() != c.A) {
      throw ConfigError("capacity", "capacity needs 1 or A entries");
    }
    for (double x : *c.capacity) {
      if (!(x > 0.0)) throw ConfigError("capacity", "capacities must be positive");
    }
  }
  try {
    c.polytope().validate(c.M);
  } catch (const Error& e) {
    throw ConfigError("capacity", e.what());
  }
  if (c.algorithms.empty()) throw ConfigError("algorithms", "algorithm list is empty");
  for (const auto& a : c.algorithms) {
    try {
      parse_algorithm(a);
    } catch (const DomainError& e) {
      throw ConfigError("algorithms", e.what());
    }
  }
  if (c.seeds.empty()) throw ConfigError("seeds", "seed list is empty");
  if (c.greedy_samples == 0) throw ConfigError("samples.greedy", "must be positive");
  if (c.report_samples == 0) throw ConfigError("samples.report", "must be positive");
  if (c.surrogate_scale != "log" && c.surrogate_scale != "linear") {
    throw ConfigError("surrogate_scale", "allowed: log, linear");
  }
  if (c.random_probe_size && *c.random_probe_size > std::min(c.I, c.A)) {
    throw ConfigError("random_probe_size", "exceeds min(I, A)");
  }
  if (!(c.phi_tau0 > 0.0 && c.phi_tau0 < 1.0)) throw ConfigError("phi.tau0", "need 0 < tau0 < 1");
  if (c.phi_breakpoints < 2) throw ConfigError("phi.breakpoints", "need at least 2");
  if (c.stride == 0) throw ConfigError("stride", "stride must be positive");
}

inline nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json env;
  env["kind"] = c.environment.kind;
  env["mu_low"] = c.environment.mu_low;
  env["mu_high"] = c.environment.mu_high;
  env["support"] = c.environment.support;
  env["csv"] = c.environment.csv;
  env["grid_step"] = c.environment.grid_step;
  nlohmann::ordered_json j;
  j["environment"] = env;
  j["M"] = c.M;
  j["A"] = c.A;
  j["T"] = c.T;
  j["I"] = c.I;
  j["delta"] = c.delta;
  if (std::isinf(c.zeta)) {
    j["zeta"] = "inf";
  } else {
    j["zeta"] = c.zeta;
  }
  if (c.overhead) {
    j["overhead"] = *c.overhead;
  } else {
    j["overhead"] = "linear";
  }
  if (c.capacity) {
    j["capacity"] = *c.capacity;
  } else {
    j["capacity"] = "default";
  }
  j["algorithms"] = c.algorithms;
  j["seeds"] = c.seeds;
  j["master_seed"] = c.master_seed;
  j["samples"] = {{"greedy", c.greedy_samples}, {"report", c.report_samples}};
  j["surrogate_scale"] = c.surrogate_scale;
  if (c.random_probe_size) {
    j["random_probe_size"] = *c.random_probe_size;
  } else {
    j["random_probe_size"] = nullptr;
  }
  j["phi"] = {{"breakpoints", c.phi_breakpoints}, {"tau0", c.phi_tau0}};
  j["stride"] = c.stride;
  j["threads"] = c.threads;
  j["output_dir"] = c.output_dir;
  return j;
}

namespace detail {

template <typename T>
T get_field(const nlohmann::json& j, const std::string& key, const std::string& path) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path, "field '" + path + "': " + e.what());
  }
}

template <typename T>
void read_opt(const nlohmann::json& j, const std::string& key, const std::string& path, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = get_field<T>(j, key, path);
}

inline std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace detail

inline ExperimentConfig from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  static const char* known[] = {"environment", "M",       "A",        "T",
                                "I",           "delta",   "zeta",     "overhead",
                                "capacity",    "algorithms", "seeds", "master_seed",
                                "samples",     "surrogate_scale", "random_probe_size",
                                "phi",         "stride",  "threads",  "output_dir"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      throw ConfigError(key, "unknown config key '" + key + "'");
    }
  }
  ExperimentConfig c;
  if (j.contains("environment")) {
    const auto& e = j.at("environment");
    if (!e.is_object()) throw ConfigError("environment", "must be an object");
    detail::read_opt(e, "kind", "environment.kind", c.environment.kind);
    detail::read_opt(e, "mu_low", "environment.mu_low", c.environment.mu_low);
    detail::read_opt(e, "mu_high", "environment.mu_high", c.environment.mu_high);
    detail::read_opt(e, "support", "environment.support", c.environment.support);
    detail::read_opt(e, "csv", "environment.csv", c.environment.csv);
    detail::read_opt(e, "grid_step", "environment.grid_step", c.environment.grid_step);
  }
  detail::read_opt(j, "M", "M", c.M);
  detail::read_opt(j, "A", "A", c.A);
  detail::read_opt(j, "T", "T", c.T);
  detail::read_opt(j, "I", "I", c.I);
  detail::read_opt(j, "delta", "delta", c.delta);
  if (j.contains("zeta")) {
    const auto& z = j.at("zeta");
    if (z.is_string() && z.get<std::string>() == "inf") {
      c.zeta = std::numeric_limits<double>::infinity();
    } else {
      c.zeta = detail::get_field<double>(j, "zeta", "zeta");
    }
  }
  if (j.contains("overhead")) {
    const auto& o = j.at("overhead");
    if (o.is_string()) {
      if (o.get<std::string>() != "linear") {
        throw ConfigError("overhead", "overhead must be \"linear\" or a table");
      }
    } else {
      c.overhead = detail::get_field<std::vector<double>>(j, "overhead", "overhead");
    }
  }
  if (j.contains("capacity")) {
    const auto& o = j.at("capacity");
    if (o.is_string()) {
      if (o.get<std::string>() != "default") {
        throw ConfigError("capacity", "capacity must be \"default\", a number or a list");
      }
    } else if (o.is_number()) {
      c.capacity = std::vector<double>{o.get<double>()};
    } else {
      c.capacity = detail::get_field<std::vector<double>>(j, "capacity", "capacity");
    }
  }
  detail::read_opt(j, "algorithms", "algorithms", c.algorithms);
  detail::read_opt(j, "seeds", "seeds", c.seeds);
  detail::read_opt(j, "master_seed", "master_seed", c.master_seed);
  if (j.contains("samples")) {
    const auto& s = j.at("samples");
    detail::read_opt(s, "greedy", "samples.greedy", c.greedy_samples);
    detail::read_opt(s, "report", "samples.report", c.report_samples);
  }
  detail::read_opt(j, "surrogate_scale", "surrogate_scale", c.surrogate_scale);
  if (j.contains("random_probe_size") && !j.at("random_probe_size").is_null()) {
    c.random_probe_size = detail::get_field<std::size_t>(j, "random_probe_size",
                                                         "random_probe_size");
  }
  if (j.contains("phi")) {
    const auto& p = j.at("phi");
    detail::read_opt(p, "breakpoints", "phi.breakpoints", c.phi_breakpoints);
    detail::read_opt(p, "tau0", "phi.tau0", c.phi_tau0);
  }
  detail::read_opt(j, "stride", "stride", c.stride);
  detail::read_opt(j, "threads", "threads", c.threads);
  detail::read_opt(j, "output_dir", "output_dir", c.output_dir);
  validate(c);
  return c;
}

inline ExperimentConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<syntax>", "parse error at line " +
                                      std::to_string(detail::line_of(text, e.byte)) + ": " +
                                      e.what());
  }
  return from_json(j);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline void save_config(const ExperimentConfig& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config '" + path + "'");
  out << to_json(c).dump(2) << "\n";
  if (!out) throw IoError("write failed for '" + path + "'");
}

// Environment seeds and run seeds come from (master_seed, seed).
inline std::uint64_t environment_seed(const ExperimentConfig& c, std::uint64_t seed) {
  return derive_seed({c.master_seed, seed, 0xe1ULL});
}

inline std::uint64_t run_seed(const ExperimentConfig& c, std::uint64_t seed) {
  return derive_seed({c.master_seed, seed, 0x40ULL});
}

inline RewardModel build_environment(const ExperimentConfig& c, std::uint64_t seed) {
  const std::uint64_t s = environment_seed(c, seed);
  const auto& e = c.environment;
  if (e.kind == "bernoulli") return make_bernoulli_env(c.M, c.A, e.mu_low, e.mu_high, s);
  if (e.kind == "discrete") return make_discrete_env(c.M, c.A, e.support, s);
  const TaxiData data = read_taxi_csv(e.csv);
  if (data.pickups.empty()) throw IoError("taxi csv '" + e.csv + "' has no usable rows");
  return make_taxi_env(data.pickups, c.M, c.A, e.grid_step, s).model;
}

inline OnlineConfig online_config(const ExperimentConfig& c, std::uint64_t seed) {
  OnlineConfig o;
  o.T = c.T;
  o.I = c.I;
  o.alpha = c.overhead_fn();
  o.zeta = c.zeta;
  o.delta = c.delta;
  o.seed = run_seed(c, seed);
  o.spec = c.polytope();
  o.phi = build_phi(1.0, c.phi_breakpoints, c.phi_tau0);
  o.estimator.samples = c.greedy_samples;
  o.greedy.scale = c.surrogate_scale == "linear" ? SurrogateScale::linear : SurrogateScale::log;
  o.random_probe_size = c.random_probe_size;
  return o;
}

inline EstimatorConfig report_estimator(const ExperimentConfig& c, std::uint64_t seed) {
  EstimatorConfig e;
  e.mode = EstimatorMode::automatic;
  e.samples = c.report_samples;
  e.seed = derive_seed({c.master_seed, seed, 0x0cULL});
  return e;
}

struct ResultRow {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::size_t t = 0;
  double cumulative_regret = 0.0;
  double nsw_geometric_mean = 0.0;
  std::size_t probe_set_size = 0;
};

struct CellResult {
  std::string algorithm;
  std::uint64_t seed = 0;
  Trajectory trajectory;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<CellResult> cells;  // filled when keep_trajectories is set
  std::map<std::uint64_t, OracleResult> benchmarks;
};

namespace detail {

// Runs jobs[0..n) on up to `threads` workers. Results land by index, so the
// output does not depend on scheduling.
template <typename F>
void parallel_for(std::size_t n, std::size_t threads, F&& job) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> workers;
  for (std::size_t w = 0; w < threads; ++w) {
    workers.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next++; i < n; i = next++) job(i);
    }));
  }
  for (auto& f : workers) f.get();
}

}  // namespace detail

inline std::vector<ResultRow> trajectory_rows(const std::string& algorithm, std::uint64_t seed,
                                              const Trajectory& traj, std::size_t stride) {
  std::vector<ResultRow> rows;
  const std::size_t T = traj.rounds.size();
  for (std::size_t t = 1; t <= T; ++t) {
    if (t % stride != 0 && t != T) continue;
    const RoundRecord& r = traj.rounds[t - 1];
    rows.push_back({algorithm, seed, t, traj.cumulative_regret[t - 1],
                    traj.nsw_geometric_mean[t - 1], r.S.size()});
  }
  return rows;
}

inline void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& x, const ResultRow& y) {
    return std::tie(x.algorithm, x.seed, x.t) < std::tie(y.algorithm, y.seed, y.t);
  });
}

inline ExperimentResult run_experiment(const ExperimentConfig& c,
                                       bool keep_trajectories = false) {
  validate(c);
  ExperimentResult res;
  const std::size_t S = c.seeds.size();
  std::vector<std::optional<RewardModel>> envs(S);
  std::vector<OracleResult> oracles(S);
  detail::parallel_for(S, c.threads, [&](std::size_t i) {
    envs[i] = build_environment(c, c.seeds[i]);
    try {
      oracles[i] = exhaustive_probe_oracle(*envs[i], c.overhead_fn(), c.I, c.polytope(),
                                           report_estimator(c, c.seeds[i]));
    } catch (const CostGuardError& e) {
      throw CostGuardError(std::string(e.what()) + " (benchmark for seed " +
                           std::to_string(c.seeds[i]) + ")");
    }
  });
  for (std::size_t i = 0; i < S; ++i) res.benchmarks.emplace(c.seeds[i], oracles[i]);

  const std::size_t n = S * c.algorithms.size();
  std::vector<CellResult> cells(n);
  detail::parallel_for(n, c.threads, [&](std::size_t k) {
    const std::size_t alg = k / S, si = k % S;
    const std::uint64_t seed = c.seeds[si];
    cells[k].algorithm = c.algorithms[alg];
    cells[k].seed = seed;
    cells[k].trajectory = run_algorithm(*envs[si], online_config(c, seed),
                                        parse_algorithm(c.algorithms[alg]),
                                        oracles[si].value.value);
  });
  for (auto& cell : cells) {
    auto rows = trajectory_rows(cell.algorithm, cell.seed, cell.trajectory, c.stride);
    res.rows.insert(res.rows.end(), rows.begin(), rows.end());
  }
  sort_rows(res.rows);
  if (keep_trajectories) res.cells = std::move(cells);
  return res;
}

// Fixed notation with 9 significant digits.
inline std::string format_sig9(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  if (x == 0.0) return "0.00000000";
  int mag = static_cast<int>(std::floor(std::log10(std::abs(x))));
  int decimals = std::max(0, 8 - mag);
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  // Rounding can carry into a new leading digit (9.99999999x -> 10.0000000).
  std::string s = buf;
  std::size_t digits = 0;
  bool leading = true;
  for (char ch : s) {
    if (ch < '0' || ch > '9') continue;
    if (leading && ch == '0') continue;
    leading = false;
    ++digits;
  }
  if (digits > 9 && decimals > 0) {
    std::snprintf(buf, sizeof buf, "%.*f", decimals - 1, x);
    s = buf;
  }
  return s;
}

inline constexpr const char* kCsvHeader =
    "algorithm,seed,t,cumulative_regret,nsw_geometric_mean,probe_set_size";

inline void emit_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  std::vector<ResultRow> sorted = rows;
  sort_rows(sorted);
  out << kCsvHeader << "\n";
  for (const ResultRow& r : sorted) {
    out << r.algorithm << "," << r.seed << "," << r.t << "," << format_sig9(r.cumulative_regret)
        << "," << format_sig9(r.nsw_geometric_mean) << "," << r.probe_set_size << "\n";
  }
}

inline void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  emit_csv(rows, out);
  out.flush();
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline std::vector<ResultRow> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw IoError("'" + path + "': missing or unexpected header");
  }
  std::vector<ResultRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 6) {
      throw IoError("'" + path + "' line " + std::to_string(lineno) + ": expected 6 fields");
    }
    try {
      rows.push_back({f[0], std::stoull(f[1]), std::stoull(f[2]), std::stod(f[3]),
                      std::stod(f[4]), std::stoull(f[5])});
    } catch (const std::exception&) {
      throw IoError("'" + path + "' line " + std::to_string(lineno) + ": malformed number");
    }
  }
  return rows;
}

struct AlgorithmSummary {
  std::string algorithm;
  std::size_t final_t = 0;
  std::size_t runs = 0;
  double mean_regret = 0.0;
  double stddev_regret = 0.0;
};

struct Reduction {
  std::string algorithm;
  std::string baseline;
  double reduction = 0.0;  // 1 - regret(algorithm) / regret(baseline)
};

struct Summary {
  std::vector<AlgorithmSummary> algorithms;
  std::vector<Reduction> reductions;

  const AlgorithmSummary* find(const std::string& name) const {
    for (const auto& a : algorithms) {
      if (a.algorithm == name) return &a;
    }
    return nullptr;
  }
};

inline Summary summarize(const std::vector<ResultRow>& rows) {
  if (rows.empty()) throw DomainError("summarize: no rows");
  std::map<std::string, std::map<std::uint64_t, const ResultRow*>> last;
  for (const ResultRow& r : rows) {
    auto& slot = last[r.algorithm][r.seed];
    if (!slot || r.t > slot->t) slot = &r;
  }
  std::optional<std::size_t> final_t;
  Summary s;
  for (const auto& [alg, runs] : last) {
    AlgorithmSummary a;
    a.algorithm = alg;
    std::vector<double> vals;
    for (const auto& [seed, row] : runs) {
      if (final_t && *final_t != row->t) {
        throw DomainError("summarize: final t differs across runs (" +
                          std::to_string(*final_t) + " vs " + std::to_string(row->t) + ")");
      }
      final_t = row->t;
      vals.push_back(row->cumulative_regret);
    }
    a.final_t = *final_t;
    a.runs = vals.size();
    for (double v : vals) a.mean_regret += v;
    a.mean_regret /= static_cast<double>(vals.size());
    if (vals.size() > 1) {
      double ss = 0.0;
      for (double v : vals) ss += (v - a.mean_regret) * (v - a.mean_regret);
      a.stddev_regret = std::sqrt(ss / static_cast<double>(vals.size() - 1));
    }
    s.algorithms.push_back(a);
  }
  for (const auto& x : s.algorithms) {
    for (const auto& y : s.algorithms) {
      if (x.algorithm == y.algorithm) continue;
      s.reductions.push_back({x.algorithm, y.algorithm,
                              y.mean_regret == 0.0 ? 0.0 : 1.0 - x.mean_regret / y.mean_regret});
    }
  }
  return s;
}

inline void emit_summary(const Summary& s, std::ostream& out) {
  out << "algorithm,final_t,runs,mean_regret,stddev_regret\n";
  for (const auto& a : s.algorithms) {
    out << a.algorithm << "," << a.final_t << "," << a.runs << "," << format_sig9(a.mean_regret)
        << "," << format_sig9(a.stddev_regret) << "\n";
  }
  out << "\nalgorithm,baseline,reduction\n";
  for (const auto& r : s.reductions) {
    out << r.algorithm << "," << r.baseline << "," << format_sig9(r.reduction) << "\n";
  }
}

}  // namespace fairprobe
