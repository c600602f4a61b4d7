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

// Command-line front end: offline, online, oracle and taxi-prep.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairprobe/fairprobe.hpp"

namespace fs = std::filesystem;
using namespace fairprobe;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> samples;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool config_required) {
  auto* c = cmd->add_option("--config", f.config, "experiment config (JSON)");
  if (config_required) c->required();
  cmd->add_option("--seed", f.seed, "seed override");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--samples", f.samples, "Monte Carlo sample count");
}

ExperimentConfig resolve(const CommonFlags& f) {
  ExperimentConfig c = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
  if (f.seed) c.seeds = {*f.seed};
  if (f.samples) {
    c.report_samples = *f.samples;
    c.greedy_samples = *f.samples;
  }
  if (!f.out.empty()) c.output_dir = f.out;
  validate(c);
  return c;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

void write_json(const nlohmann::ordered_json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

nlohmann::ordered_json estimate_json(const Estimate& e) {
  return {{"value", e.value}, {"std_error", e.std_error},
          {"sample_count", e.sample_count}, {"exact", e.exact}};
}

int cmd_offline(const CommonFlags& f) {
  const ExperimentConfig c = resolve(f);
  const std::uint64_t seed = c.seeds.front();
  const RewardModel env = build_environment(c, seed);
  const OverheadFn alpha = c.overhead_fn();
  const PolytopeSpec spec = c.polytope();
  const PiecewiseLogUpper phi = build_phi(1.0, c.phi_breakpoints, c.phi_tau0);
  EstimatorConfig est = report_estimator(c, seed);
  GreedyOptions opts;
  opts.scale = c.surrogate_scale == "linear" ? SurrogateScale::linear : SurrogateScale::log;

  GreedyTrace trace;
  const ProbeSet chosen = greedy_probe(env, alpha, c.I, c.zeta, phi, spec, est, opts, &trace);
  const Estimate r_chosen = estimate_R(env, chosen, alpha, spec, est);
  const OracleResult oracle = exhaustive_probe_oracle(env, alpha, c.I, spec, est);

  const double e = std::exp(1.0);
  const double ratio = (e - 1.0) / ((2.0 * e - 1.0) * c.zeta);
  const double slack = 3.0 * std::max(r_chosen.std_error, oracle.value.std_error);
  const bool holds = r_chosen.value >= ratio * oracle.value.value - slack;

  double gap = 0.0;
  for (std::size_t i = 0; i < trace.chain.size(); ++i) {
    if (trace.g[i] > 0.0) gap = std::max(gap, trace.f_upper[i] - std::log(trace.g[i]));
  }

  std::cout << "environment      " << c.environment.kind << " M=" << c.M << " A=" << c.A
            << " seed=" << seed << "\n"
            << "greedy set       " << chosen.to_string() << "  (" << trace.outcome << ")\n"
            << "R(greedy)        " << r_chosen.value << " +- " << r_chosen.std_error << "\n"
            << "oracle set       " << oracle.best.to_string() << "\n"
            << "R(oracle)        " << oracle.value.value << " +- " << oracle.value.std_error
            << "\n"
            << "h(empty)         " << trace.h_empty << "\n"
            << "max f_upper-log g " << gap << "\n"
            << "bound " << (holds ? "PASS" : "FAIL") << "  R(greedy) >= " << ratio
            << " * R(oracle) - " << slack << "\n";

  if (!f.out.empty()) {
    ensure_dir(c.output_dir);
    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["greedy_set"] = chosen.arms();
    j["greedy_outcome"] = trace.outcome;
    j["R_greedy"] = estimate_json(r_chosen);
    j["oracle_set"] = oracle.best.arms();
    j["R_oracle"] = estimate_json(oracle.value);
    j["h_empty"] = trace.h_empty;
    j["max_surrogate_gap"] = gap;
    j["bound_ratio"] = ratio;
    j["bound_holds"] = holds;
    write_json(j, (fs::path(c.output_dir) / "offline.json").string());
  }
  return 0;
}

int cmd_online(const CommonFlags& f) {
  const ExperimentConfig c = resolve(f);
  const ExperimentResult res = run_experiment(c);
  ensure_dir(c.output_dir);
  const fs::path dir(c.output_dir);
  emit_csv(res.rows, (dir / "results.csv").string());
  save_config(c, (dir / "config.json").string());
  const Summary s = summarize(res.rows);
  {
    std::ofstream out(dir / "summary.csv");
    if (!out) throw IoError("cannot write '" + (dir / "summary.csv").string() + "'");
    emit_summary(s, out);
  }
  emit_summary(s, std::cout);
  std::cout << "wrote " << (dir / "results.csv").string() << "\n";
  return 0;
}

int cmd_oracle(const CommonFlags& f) {
  const ExperimentConfig c = resolve(f);
  nlohmann::ordered_json all = nlohmann::ordered_json::array();
  for (std::uint64_t seed : c.seeds) {
    const RewardModel env = build_environment(c, seed);
    const OracleResult o = exhaustive_probe_oracle(env, c.overhead_fn(), c.I, c.polytope(),
                                                   report_estimator(c, seed));
    std::cout << "seed " << seed << "  S* = " << o.best.to_string() << "  R(S*) = "
              << o.value.value << " +- " << o.value.std_error << "\n";
    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["best_set"] = o.best.arms();
    j["value"] = estimate_json(o.value);
    nlohmann::ordered_json sets = nlohmann::ordered_json::array();
    for (const auto& [S, e] : o.evaluated) sets.push_back({{"set", S.arms()}, {"R", estimate_json(e)}});
    j["evaluated"] = sets;
    all.push_back(j);
  }
  if (!f.out.empty()) {
    ensure_dir(c.output_dir);
    write_json(all, (fs::path(c.output_dir) / "oracle.json").string());
  }
  return 0;
}

int cmd_taxi_prep(const CommonFlags& f, const std::string& csv_flag) {
  ExperimentConfig c;
  if (!f.config.empty()) c = load_config(f.config);
  std::string csv = csv_flag.empty() ? c.environment.csv : csv_flag;
  if (csv.empty()) throw ConfigError("environment.csv", "no taxi csv given (--csv or config)");
  const std::uint64_t seed = f.seed.value_or(c.seeds.front());
  const TaxiData data = read_taxi_csv(csv);
  if (data.pickups.empty()) throw IoError("taxi csv '" + csv + "' has no usable rows");
  const TaxiEnvironment env = make_taxi_env(data.pickups, c.M, c.A, c.environment.grid_step,
                                            environment_seed(c, seed));
  std::cout << "pickups " << data.pickups.size() << " (skipped " << data.skipped_rows
            << ")  occupied cells " << env.occupied_cells << "  arms " << env.arms.size()
            << "  vehicles " << env.vehicles.size() << "  max distance " << env.max_distance
            << "\n";
  for (std::size_t a = 0; a < env.arms.size(); ++a) {
    const GridCell& g = env.arms[a];
    std::cout << "arm " << a << "  cell (" << g.row << "," << g.col << ")  pickups " << g.count
              << "\n";
  }
  if (!f.out.empty()) {
    ensure_dir(f.out);
    nlohmann::ordered_json j;
    j["csv"] = csv;
    j["pickups"] = data.pickups.size();
    j["skipped_rows"] = data.skipped_rows;
    j["grid_step"] = c.environment.grid_step;
    j["occupied_cells"] = env.occupied_cells;
    j["max_distance"] = env.max_distance;
    nlohmann::ordered_json arms = nlohmann::ordered_json::array();
    for (const GridCell& g : env.arms) {
      arms.push_back({{"row", g.row}, {"col", g.col}, {"count", g.count},
                      {"lat", g.center.lat}, {"lon", g.center.lon}});
    }
    j["arms"] = arms;
    nlohmann::ordered_json vehicles = nlohmann::ordered_json::array();
    for (const GeoPoint& v : env.vehicles) vehicles.push_back({{"lat", v.lat}, {"lon", v.lon}});
    j["vehicles"] = vehicles;
    nlohmann::ordered_json rewards = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < env.model.num_agents(); ++i) {
      std::vector<double> row;
      for (std::size_t a = 0; a < env.model.num_arms(); ++a) row.push_back(env.model.mean(i, a));
      rewards.push_back(row);
    }
    j["rewards"] = rewards;
    write_json(j, (fs::path(f.out) / "taxi_env.json").string());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairprobe: fair multi-agent bandits with probing"};
  app.require_subcommand(1);

  CommonFlags offline_f, online_f, oracle_f, taxi_f;
  std::string taxi_csv;
  auto* offline = app.add_subcommand("offline", "greedy probing vs exhaustive oracle on one instance");
  add_common(offline, offline_f, false);
  auto* online = app.add_subcommand("online", "run a full experiment from a config");
  add_common(online, online_f, true);
  auto* oracle = app.add_subcommand("oracle", "compute the offline benchmark only");
  add_common(oracle, oracle_f, false);
  auto* taxi = app.add_subcommand("taxi-prep", "bin taxi pickups into a point-mass environment");
  add_common(taxi, taxi_f, false);
  taxi->add_option("--csv", taxi_csv, "pickup csv (overrides the config)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*offline) return cmd_offline(offline_f);
    if (*online) return cmd_online(online_f);
    if (*oracle) return cmd_oracle(oracle_f);
    if (*taxi) return cmd_taxi_prep(taxi_f, taxi_csv);
  } catch (const ConfigError& e) {
    std::cerr << "error: ConfigError [" << e.field() << "]: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: InternalError: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
