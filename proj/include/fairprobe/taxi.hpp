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
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fairprobe/errors.hpp"
#include "fairprobe/model.hpp"
#include "fairprobe/rng.hpp"

namespace fairprobe {

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
};

struct TaxiData {
  std::vector<GeoPoint> pickups;
  std::size_t skipped_rows = 0;
};

// Grid cell of side grid_step degrees, indexed by floor(coord / step).
struct GridCell {
  std::int64_t row = 0;  // latitude index
  std::int64_t col = 0;  // longitude index
  std::size_t count = 0;
  GeoPoint center;
};

struct TaxiEnvironment {
  RewardModel model;
  std::vector<GridCell> arms;        // the A most frequent cells
  std::vector<GeoPoint> vehicles;    // M fixed agent positions
  double max_distance = 0.0;         // normalizer
  std::size_t occupied_cells = 0;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  out.push_back(field);
  return out;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\"");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\"");
  return s.substr(b, e - b + 1);
}

inline bool parse_double(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

}  // namespace detail

// Reads pickup coordinates from a CSV with a header row. Only the
// pickup_latitude and pickup_longitude columns are used; rows that do not
// parse are counted in skipped_rows.
inline TaxiData read_taxi_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("taxi csv: missing header");
  const auto header = detail::split_csv_line(line);
  std::size_t lat_col = SIZE_MAX, lon_col = SIZE_MAX;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = detail::trim(header[i]);
    if (name == "pickup_latitude") lat_col = i;
    if (name == "pickup_longitude") lon_col = i;
  }
  if (lat_col == SIZE_MAX || lon_col == SIZE_MAX) {
    throw DomainError(
        "taxi csv: header must contain pickup_latitude and pickup_longitude");
  }
  TaxiData data;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = detail::split_csv_line(line);
    GeoPoint p;
    if (fields.size() <= std::max(lat_col, lon_col) ||
        !detail::parse_double(fields[lat_col], p.lat) ||
        !detail::parse_double(fields[lon_col], p.lon)) {
      ++data.skipped_rows;
      continue;
    }
    data.pickups.push_back(p);
  }
  return data;
}

inline TaxiData read_taxi_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open taxi csv '" + path + "'");
  return read_taxi_csv(in);
}

inline double manhattan(const GeoPoint& x, const GeoPoint& y) {
  return std::abs(x.lat - y.lat) + std::abs(x.lon - y.lon);
}

// Bins pickups into cells and orders them by (count desc, row asc, col asc).
inline std::vector<GridCell> bin_pickups(const std::vector<GeoPoint>& pickups,
                                         double grid_step) {
  if (!(grid_step > 0.0)) throw DomainError("taxi: grid step must be positive");
  std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> counts;
  for (const auto& p : pickups) {
    const auto r = static_cast<std::int64_t>(std::floor(p.lat / grid_step));
    const auto c = static_cast<std::int64_t>(std::floor(p.lon / grid_step));
    ++counts[{r, c}];
  }
  std::vector<GridCell> cells;
  cells.reserve(counts.size());
  for (const auto& [key, n] : counts) {
    GridCell cell;
    cell.row = key.first;
    cell.col = key.second;
    cell.count = n;
    cell.center = {(static_cast<double>(key.first) + 0.5) * grid_step,
                   (static_cast<double>(key.second) + 0.5) * grid_step};
    cells.push_back(cell);
  }
  std::stable_sort(cells.begin(), cells.end(), [](const GridCell& x, const GridCell& y) {
    if (x.count != y.count) return x.count > y.count;
    if (x.row != y.row) return x.row < y.row;
    return x.col < y.col;
  });
  return cells;
}

// Point-mass rewards 1 - d(j,a) / max d, with d the Manhattan distance
// between vehicle j and the center of cell a.
inline RewardModel taxi_reward_model(const std::vector<GridCell>& arms,
                                     const std::vector<GeoPoint>& vehicles,
                                     double* max_distance_out = nullptr) {
  const std::size_t M = vehicles.size();
  const std::size_t A = arms.size();
  double dmax = 0.0;
  for (const auto& v : vehicles) {
    for (const auto& c : arms) dmax = std::max(dmax, manhattan(v, c.center));
  }
  std::vector<DiscreteDistribution> dists;
  dists.reserve(M * A);
  for (const auto& v : vehicles) {
    for (const auto& c : arms) {
      double r = dmax > 0.0 ? 1.0 - manhattan(v, c.center) / dmax : 1.0;
      dists.push_back(DiscreteDistribution::point_mass(std::clamp(r, 0.0, 1.0)));
    }
  }
  if (max_distance_out) *max_distance_out = dmax;
  return RewardModel(M, A, std::move(dists));
}

// Builds the ride-hailing environment: the A busiest cells become arms and
// M vehicles are placed uniformly at random inside the pickups' bounding
// box.
inline TaxiEnvironment make_taxi_env(const std::vector<GeoPoint>& pickups,
                                     std::size_t M, std::size_t A,
                                     double grid_step, std::uint64_t seed) {
  if (M == 0 || A == 0) throw DomainError("taxi: M and A must be positive");
  auto cells = bin_pickups(pickups, grid_step);
  if (cells.size() < A) {
    throw DomainError("taxi: only " + std::to_string(cells.size()) +
                      " occupied grid cells, need " + std::to_string(A));
  }
  const std::size_t occupied = cells.size();
  cells.resize(A);

  GeoPoint lo = pickups.front(), hi = pickups.front();
  for (const auto& p : pickups) {
    lo.lat = std::min(lo.lat, p.lat);
    lo.lon = std::min(lo.lon, p.lon);
    hi.lat = std::max(hi.lat, p.lat);
    hi.lon = std::max(hi.lon, p.lon);
  }
  Rng rng(seed);
  std::vector<GeoPoint> vehicles(M);
  for (auto& v : vehicles) {
    v.lat = lo.lat + (hi.lat - lo.lat) * rng.uniform();
    v.lon = lo.lon + (hi.lon - lo.lon) * rng.uniform();
  }
  double dmax = 0.0;
  RewardModel model = taxi_reward_model(cells, vehicles, &dmax);
  return TaxiEnvironment{std::move(model), std::move(cells), std::move(vehicles),
                         dmax, occupied};
}

}  // namespace fairprobe
