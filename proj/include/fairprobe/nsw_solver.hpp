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
#include <limits>
#include <optional>
#include <vector>

#include "fairprobe/allocation.hpp"
#include "fairprobe/errors.hpp"
#include "fairprobe/matrix.hpp"

namespace fairprobe {

namespace detail {

// Euclidean projection of z onto {x >= 0, sum x = 1} (sum_active = true) or
// {x >= 0, sum x <= 1}. Writes into x and returns whether the sum
// constraint is binding.
inline bool project_row(std::span<const double> z, std::span<double> x,
                        bool at_most_one, std::vector<double>& scratch) {
  const std::size_t n = z.size();
  if (at_most_one) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::max(z[i], 0.0);
    if (s <= 1.0) {
      for (std::size_t i = 0; i < n; ++i) x[i] = std::max(z[i], 0.0);
      return false;
    }
  }
  scratch.assign(z.begin(), z.end());
  std::sort(scratch.begin(), scratch.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    cum += scratch[k];
    const double t = (cum - 1.0) / static_cast<double>(k + 1);
    if (scratch[k] - t > 0.0) theta = t;
  }
  for (std::size_t i = 0; i < n; ++i) x[i] = std::max(z[i] - theta, 0.0);
  return true;
}

// Solves the symmetric positive definite system K d = b in place (small n).
inline bool solve_spd(std::vector<double>& K, std::vector<double>& b, std::size_t n) {
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(K[r * n + c]) > std::abs(K[piv * n + c])) piv = r;
    }
    if (std::abs(K[piv * n + c]) < 1e-300) return false;
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(K[c * n + k], K[piv * n + k]);
      std::swap(b[c], b[piv]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = K[r * n + c] / K[c * n + c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) K[r * n + k] -= f * K[c * n + k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t c = n; c-- > 0;) {
    double s = b[c];
    for (std::size_t k = c + 1; k < n; ++k) s -= K[c * n + k] * b[k];
    b[c] = s / K[c * n + c];
  }
  return true;
}

}  // namespace detail

// Euclidean projection onto a PolytopeSpec polytope.
//
// Rows decouple once the column caps are priced: for multipliers
// lambda >= 0 each row is a simplex projection of (y_j - lambda). The
// multipliers maximize the concave piecewise-quadratic dual, solved here by
// a semi-smooth Newton iteration with a projected-gradient fallback. The
// last multipliers are kept as a warm start for the next call.
class PolytopeProjector {
 public:
  PolytopeProjector(const PolytopeSpec& spec, std::size_t num_agents)
      : spec_(spec), M_(num_agents) {
    for (std::size_t a = 0; a < spec_.allowed.size(); ++a) {
      if (spec_.allowed[a]) idx_.push_back(a);
    }
    lambda_.assign(idx_.size(), 0.0);
  }

  void project(const Matrix& y, Matrix& out) {
    out = Matrix(M_, spec_.num_arms());
    const std::size_t n = idx_.size();
    if (n == 0) return;
    xs_.assign(M_ * n, 0.0);
    active_.assign(M_, 0);

    double q = evaluate(y, lambda_);
    std::vector<double> g = grad_;
    std::vector<double> trial(n), d(n), K, rhs;
    double best_res = residual(lambda_, g);
    std::vector<double> best = lambda_;
    for (int it = 0; it < 200; ++it) {
      const double res = residual(lambda_, g);
      if (res < best_res) {
        best_res = res;
        best = lambda_;
      }
      if (res <= kTol) break;

      std::vector<std::size_t> free;
      for (std::size_t i = 0; i < n; ++i) {
        if (lambda_[i] > 0.0 || g[i] > 0.0) free.push_back(i);
      }
      const std::size_t nf = free.size();
      const std::vector<double> H = jacobian();
      K.assign(nf * nf, 0.0);
      rhs.assign(nf, 0.0);
      for (std::size_t r = 0; r < nf; ++r) {
        for (std::size_t c = 0; c < nf; ++c) K[r * nf + c] = -H[free[r] * n + free[c]];
        K[r * nf + r] += kReg;
        rhs[r] = g[free[r]];
      }
      bool moved = false;
      if (detail::solve_spd(K, rhs, nf)) {
        std::fill(d.begin(), d.end(), 0.0);
        for (std::size_t r = 0; r < nf; ++r) d[free[r]] = rhs[r];
        double step = 1.0;
        for (int ls = 0; ls < 60 && !moved; ++ls, step *= 0.5) {
          for (std::size_t i = 0; i < n; ++i) trial[i] = std::max(lambda_[i] + step * d[i], 0.0);
          const double qt = evaluate(y, trial);
          // Near the root the dual gain drops below roundoff; the slope at
          // the trial point and the KKT residual then decide.
          double slope = 0.0;
          for (std::size_t i = 0; i < n; ++i) slope += grad_[i] * (trial[i] - lambda_[i]);
          if (qt > q || slope >= 0.0 ||
              (qt >= q - 1e-12 * (1.0 + std::abs(q)) &&
               residual(trial, grad_) < 0.5 * residual(lambda_, g))) {
            lambda_ = trial;
            q = qt;
            g = grad_;
            moved = true;
          }
        }
      }
      if (!moved) {
        // Gradient ascent with step 1/L, L <= M.
        for (std::size_t i = 0; i < n; ++i) {
          trial[i] = std::max(lambda_[i] + g[i] / static_cast<double>(M_), 0.0);
        }
        const double qt = evaluate(y, trial);
        if (!(qt > q)) {
          evaluate(y, lambda_);
          break;
        }
        lambda_ = trial;
        q = qt;
        g = grad_;
      }
    }
    if (residual(lambda_, g) > best_res) {
      lambda_ = best;
      evaluate(y, lambda_);
    }
    // xs_ holds the rows for the current lambda_.
    for (std::size_t j = 0; j < M_; ++j) {
      for (std::size_t i = 0; i < n; ++i) out(j, idx_[i]) = xs_[j * n + i];
    }
  }

 private:
  static constexpr double kTol = 1e-13;
  static constexpr double kReg = 1e-12;

  // Projects every row for multipliers lam; stores rows, binding flags and
  // the dual gradient. Returns the dual objective.
  double evaluate(const Matrix& y, const std::vector<double>& lam) {
    const std::size_t n = idx_.size();
    const bool at_most_one = spec_.row_mode == RowMode::at_most_one;
    grad_.assign(n, 0.0);
    z_.resize(n);
    double q = 0.0;
    for (std::size_t j = 0; j < M_; ++j) {
      for (std::size_t i = 0; i < n; ++i) z_[i] = y(j, idx_[i]) - lam[i];
      std::span<double> x(xs_.data() + j * n, n);
      active_[j] = detail::project_row(z_, x, at_most_one, scratch_);
      for (std::size_t i = 0; i < n; ++i) {
        const double diff = x[i] - y(j, idx_[i]);
        q += 0.5 * diff * diff + lam[i] * x[i];
        grad_[i] += x[i];
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      grad_[i] -= spec_.capacity[idx_[i]];
      q -= lam[i] * spec_.capacity[idx_[i]];
    }
    return q;
  }

  static double residual(const std::vector<double>& lam, const std::vector<double>& g) {
    double r = 0.0;
    for (std::size_t i = 0; i < lam.size(); ++i) {
      r = std::max(r, lam[i] > 0.0 ? std::abs(g[i]) : std::max(g[i], 0.0));
    }
    return r;
  }

  // Generalized Jacobian of the column sums with respect to lambda.
  std::vector<double> jacobian() const {
    const std::size_t n = idx_.size();
    std::vector<double> H(n * n, 0.0);
    std::vector<std::size_t> support;
    for (std::size_t j = 0; j < M_; ++j) {
      support.clear();
      for (std::size_t i = 0; i < n; ++i) {
        if (xs_[j * n + i] > 0.0) support.push_back(i);
      }
      for (std::size_t i : support) H[i * n + i] -= 1.0;
      if (active_[j] && !support.empty()) {
        const double w = 1.0 / static_cast<double>(support.size());
        for (std::size_t r : support) {
          for (std::size_t c : support) H[r * n + c] += w;
        }
      }
    }
    return H;
  }

  PolytopeSpec spec_;
  std::size_t M_;
  std::vector<std::size_t> idx_;
  std::vector<double> lambda_;
  std::vector<double> xs_, grad_, z_, scratch_;
  std::vector<char> active_;
};

struct NswSolveOptions {
  double tol = 1e-8;
  int max_iters = 10000;
  // Starting point; projected onto the polytope. Uniform over allowed arms
  // when absent.
  std::optional<Matrix> initial;
  bool record_trace = false;
};

struct NswSolution {
  AllocationPolicy policy;
  double value = 0.0;  // raw product at policy
  int iterations = 0;
  std::vector<double> objective_trace;  // log objective per accepted iterate
};

inline constexpr double kLogFloor = 1e-12;
inline constexpr double kMaxMove = 2.0;

// Maximizes prod_j sum_a pi(j,a) v(j,a) over the polytope.
//
// Works on sum_j log(u_j + 1e-12), which is concave, with projected
// gradient ascent with Nesterov momentum. Steps halve until the quadratic
// upper-bound test passes and double after each accepted iterate. Momentum
// resets whenever the objective would drop, so iterates stay feasible and
// the log objective never decreases. Stops after two consecutive gains
// below tol.
inline NswSolution solve_nsw(const ValueMatrix& values, const PolytopeSpec& spec,
                             const NswSolveOptions& opts = {}) {
  const std::size_t M = values.num_agents();
  const std::size_t A = values.num_arms();
  if (spec.num_arms() != A) {
    throw DomainError("solve_nsw: polytope has " + std::to_string(spec.num_arms()) +
                      " arms, values have " + std::to_string(A));
  }
  spec.validate(M);
  const Matrix& v = values.values();

  PolytopeProjector proj(spec, M);
  Matrix pi;
  {
    Matrix start(M, A, 0.0);
    if (opts.initial) {
      require_same_shape(*opts.initial, start, "solve_nsw initial point");
      start = *opts.initial;
    } else {
      std::size_t n = 0;
      for (bool b : spec.allowed) n += b ? 1 : 0;
      for (std::size_t j = 0; j < M; ++j) {
        for (std::size_t a = 0; a < A; ++a) {
          if (spec.allowed[a]) start(j, a) = 1.0 / static_cast<double>(n);
        }
      }
    }
    proj.project(start, pi);
  }

  auto objective = [&](const Matrix& p, std::vector<double>& u) {
    u = agent_utilities(v, p);
    double f = 0.0;
    for (double x : u) f += std::log(x + kLogFloor);
    return f;
  };

  NswSolution sol;
  std::vector<double> u, u_trial;
  double f = objective(pi, u);
  if (opts.record_trace) sol.objective_trace.push_back(f);

  auto gradient = [&](const std::vector<double>& uu, Matrix& g) {
    for (std::size_t j = 0; j < M; ++j) {
      const double inv = 1.0 / (uu[j] + kLogFloor);
      for (std::size_t a = 0; a < A; ++a) g(j, a) = spec.allowed[a] ? v(j, a) * inv : 0.0;
    }
  };

  // Accelerated projected gradient with backtracking on the step length and
  // a restart whenever the objective would drop.
  Matrix pi_prev = pi, y = pi, grad(M, A), z(M, A), trial;
  std::vector<double> u_y;
  double step = 1.0, momentum = 1.0;
  int it = 0, stalls = 0;
  for (; it < opts.max_iters; ++it) {
    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    const double beta = (momentum - 1.0) / next_momentum;
    for (std::size_t k = 0; k < y.data().size(); ++k) {
      y.data()[k] = pi.data()[k] + beta * (pi.data()[k] - pi_prev.data()[k]);
    }
    double f_y = objective(y, u_y);
    if (beta == 0.0 || !std::isfinite(f_y) ||
        std::any_of(u_y.begin(), u_y.end(), [](double x) { return x <= 0.0; })) {
      y = pi;
      u_y = u;
      f_y = f;
    }
    gradient(u_y, grad);
    if (spec.row_mode == RowMode::exact_one) {
      // Rows sum to one, so a constant per row changes neither the projection
      // nor the linear model. Removing it keeps the step cap meaningful.
      for (std::size_t j = 0; j < M; ++j) {
        double s = 0.0;
        std::size_t n = 0;
        for (std::size_t a = 0; a < A; ++a) {
          if (spec.allowed[a]) s += grad(j, a), ++n;
        }
        for (std::size_t a = 0; a < A; ++a) {
          if (spec.allowed[a]) grad(j, a) -= s / static_cast<double>(n);
        }
      }
    }
    double gmax = 0.0;
    for (double x : grad.data()) gmax = std::max(gmax, std::abs(x));
    // Keeps projection inputs within a few units of the polytope.
    const double cap = kMaxMove / std::max(gmax, 1e-12);
    step = std::min(step, cap);
    bool limited = step >= cap;

    bool accepted = false;
    double f_trial = f_y;
    for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
      limited = limited || ls > 0;
      for (std::size_t k = 0; k < z.data().size(); ++k) {
        z.data()[k] = y.data()[k] + step * grad.data()[k];
      }
      proj.project(z, trial);
      double lin = 0.0, sq = 0.0;
      for (std::size_t k = 0; k < z.data().size(); ++k) {
        const double d = trial.data()[k] - y.data()[k];
        lin += grad.data()[k] * d;
        sq += d * d;
      }
      f_trial = objective(trial, u_trial);
      if (f_trial >= f_y + lin - sq / (2.0 * step) - 1e-15 * std::abs(f_y)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;

    if (f_trial < f) {
      // Momentum overshot: restart from the current iterate.
      momentum = 1.0;
      pi_prev = pi;
      if (beta == 0.0) {
        ++it;
        break;
      }
      continue;
    }
    const double improvement = f_trial - f;
    std::swap(pi_prev, pi);
    std::swap(pi, trial);
    std::swap(u, u_trial);
    f = f_trial;
    momentum = next_momentum;
    step *= 2.0;
    if (opts.record_trace) sol.objective_trace.push_back(f);
    // Small gains while the step is still growing mean a flat direction,
    // not convergence. One short step can follow a restart, so two limited
    // small improvements in a row are required.
    stalls = improvement < opts.tol && limited ? stalls + 1 : 0;
    if (stalls >= 2) {
      ++it;
      break;
    }
  }

  sol.iterations = it;
  sol.value = nsw_value(v, pi);
  sol.policy = AllocationPolicy{std::move(pi), spec.capacity,
                                spec.row_mode == RowMode::at_most_one};
  return sol;
}

}  // namespace fairprobe
