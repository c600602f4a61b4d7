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


#include <gtest/gtest.h>

#include <cmath>

#include "fairprobe/fairprobe.hpp"
#include "test_util.hpp"

namespace fp = fairprobe;

namespace {

fp::PolytopeSpec unit_caps(std::size_t A, fp::RowMode mode = fp::RowMode::exact_one) {
  return fp::PolytopeSpec::full(std::vector<double>(A, 1.0), mode);
}

fp::Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  fp::Matrix m(rows.size(), rows.begin()->size());
  std::size_t j = 0;
  for (const auto& r : rows) {
    std::size_t a = 0;
    for (double x : r) m(j, a++) = x;
    ++j;
  }
  return m;
}

// Feasible point: convex mix of random one-arm-per-agent assignments.
fp::Matrix random_feasible(const fp::PolytopeSpec& spec, std::size_t M, fp::Rng& rng) {
  fp::Matrix pi(M, spec.num_arms());
  const int k = 3;
  for (int i = 0; i < k; ++i) {
    const fp::Matrix one = fp::detail::random_assignment(spec, M, rng);
    for (std::size_t n = 0; n < pi.data().size(); ++n) pi.data()[n] += one.data()[n] / k;
  }
  return pi;
}

}  // namespace

TEST(NswValue, ProductOfAgentUtilities) {
  const fp::Matrix half(2, 2, 0.5);
  EXPECT_DOUBLE_EQ(fp::nsw_value(half, fp::Matrix(2, 2, 0.5)), 0.25);
  const auto v = mat({{0.9, 0.1}, {0.2, 0.8}});
  EXPECT_DOUBLE_EQ(fp::nsw_value(v, mat({{1, 0}, {0, 1}})), 0.72);
  EXPECT_EQ(fp::nsw_value(v, mat({{1, 0}, {0, 0}})), 0.0);
  EXPECT_THROW(fp::nsw_value(v, fp::Matrix(3, 2)), fp::DomainError);
}

TEST(NswValue, SmoothnessBound) {
  fp::Rng rng(21);
  const auto spec = unit_caps(5);
  for (int rep = 0; rep < 200; ++rep) {
    const auto u = fp::testing::random_matrix(4, 5, rng);
    const auto v = fp::testing::random_matrix(4, 5, rng);
    const auto pi = random_feasible(spec, 4, rng);
    double bound = 0.0;
    for (std::size_t n = 0; n < pi.data().size(); ++n) {
      bound += pi.data()[n] * std::abs(u.data()[n] - v.data()[n]);
    }
    EXPECT_LE(std::abs(fp::nsw_value(u, pi) - fp::nsw_value(v, pi)), bound + 1e-15);
  }
}

TEST(ValueMatrix, RejectsOutOfRangeEntries) {
  EXPECT_THROW(fp::ValueMatrix(fp::Matrix(1, 1, 1.5)), fp::DomainError);
  EXPECT_THROW(fp::ValueMatrix(fp::Matrix(1, 2, 0.5), std::vector<fp::ValueSource>{fp::ValueSource::mean}),
               fp::DomainError);
}

TEST(PolytopeSpec, InfeasibleCapacityNamesTotal) {
  const auto spec = unit_caps(2);
  try {
    spec.validate(3);
    FAIL() << "expected InfeasibleError";
  } catch (const fp::InfeasibleError& e) {
    EXPECT_NE(std::string(e.what()).find("capacity 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(fp::solve_nsw(fp::ValueMatrix(fp::Matrix(3, 2, 0.5)), spec),
               fp::InfeasibleError);
  EXPECT_NO_THROW(unit_caps(2, fp::RowMode::at_most_one).validate(3));
}

TEST(DefaultCapacity, CeilOfAgentsPerArm) {
  EXPECT_EQ(fp::default_capacity(12, 8), std::vector<double>(8, 2.0));
  EXPECT_EQ(fp::default_capacity(3, 8), std::vector<double>(8, 1.0));
  EXPECT_EQ(fp::default_capacity(20, 10), std::vector<double>(10, 2.0));
}

TEST(SolveNsw, SingleAgentPicksBestArm) {
  const auto sol = fp::solve_nsw(fp::ValueMatrix(mat({{0.3, 0.8}})), unit_caps(2));
  EXPECT_NEAR(sol.value, 0.8, 1e-8);
  EXPECT_NEAR(sol.policy.pi(0, 1), 1.0, 1e-6);
}

TEST(SolveNsw, MatchesGridOracleOnTwoByTwo) {
  const fp::ValueMatrix v(mat({{0.9, 0.1}, {0.8, 0.2}}));
  const auto sol = fp::solve_nsw(v, unit_caps(2));
  const auto ref = fp::solve_nsw_oracle(v, unit_caps(2), 200);
  EXPECT_NEAR(sol.value, ref.value, 1e-3);
  EXPECT_GE(sol.value, ref.value - 1e-9);
}

TEST(SolveNsw, ConstantValuesGiveConstantWelfare) {
  for (double vbar : {0.2, 0.5, 0.9}) {
    const auto sol = fp::solve_nsw(fp::ValueMatrix(fp::Matrix(4, 3, vbar)),
                                   fp::PolytopeSpec::full(fp::default_capacity(4, 3)));
    EXPECT_NEAR(sol.value, std::pow(vbar, 4), 1e-8);
  }
}

TEST(SolveNsw, ReturnsFeasiblePolicies) {
  fp::Rng rng(4);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t M = 1 + rng.below(12), A = 1 + rng.below(8);
    auto spec = fp::PolytopeSpec::full(fp::default_capacity(M, A));
    if (rep % 3 == 0) spec.row_mode = fp::RowMode::at_most_one;
    const auto v = fp::testing::random_matrix(M, A, rng);
    const auto sol = fp::solve_nsw(fp::ValueMatrix(v), spec);
    EXPECT_TRUE(sol.policy.feasible(1e-6)) << "violation " << sol.policy.max_violation();
    EXPECT_EQ(sol.value, fp::nsw_value(v, sol.policy.pi));
  }
}

TEST(SolveNsw, RespectsDisallowedArms) {
  fp::Rng rng(8);
  auto spec = fp::PolytopeSpec::full({3.0, 3.0, 3.0, 3.0});
  spec.allowed[1] = false;
  spec.allowed[3] = false;
  const auto sol = fp::solve_nsw(fp::ValueMatrix(fp::testing::random_matrix(5, 4, rng)), spec);
  for (std::size_t j = 0; j < 5; ++j) {
    EXPECT_EQ(sol.policy.pi(j, 1), 0.0);
    EXPECT_EQ(sol.policy.pi(j, 3), 0.0);
    EXPECT_NEAR(sol.policy.pi.row_sum(j), 1.0, 1e-9);
  }
}

TEST(SolveNsw, ObjectiveTraceIsNonDecreasing) {
  fp::Rng rng(12);
  fp::NswSolveOptions opts;
  opts.record_trace = true;
  for (int rep = 0; rep < 30; ++rep) {
    const auto v = fp::testing::random_matrix(12, 8, rng);
    const auto sol = fp::solve_nsw(fp::ValueMatrix(v), fp::PolytopeSpec::full(fp::default_capacity(12, 8)), opts);
    ASSERT_FALSE(sol.objective_trace.empty());
    for (std::size_t k = 1; k < sol.objective_trace.size(); ++k) {
      EXPECT_GE(sol.objective_trace[k], sol.objective_trace[k - 1]);
    }
  }
}

TEST(SolveNsw, ScaleCovariance) {
  fp::Rng rng(33);
  const auto spec = fp::PolytopeSpec::full(fp::default_capacity(4, 3));
  for (int rep = 0; rep < 20; ++rep) {
    const auto v = fp::testing::random_matrix(4, 3, rng, 0.1, 1.0);
    const double lambda = 0.2 + 0.8 * rng.uniform();
    fp::Matrix w = v;
    for (double& x : w.data()) x *= lambda;
    const double base = fp::solve_nsw(fp::ValueMatrix(v), spec).value;
    const double scaled = fp::solve_nsw(fp::ValueMatrix(w), spec).value;
    EXPECT_NEAR(scaled / base, std::pow(lambda, 4), 1e-6);
  }
}

TEST(SolveNsw, DominatesRandomFeasiblePoints) {
  fp::Rng rng(5);
  const auto spec = fp::PolytopeSpec::full(fp::default_capacity(12, 8));
  for (int rep = 0; rep < 10; ++rep) {
    const auto v = fp::testing::random_matrix(12, 8, rng);
    const double best = fp::solve_nsw(fp::ValueMatrix(v), spec).value;
    for (int k = 0; k < 50; ++k) {
      EXPECT_GE(best, fp::nsw_value(v, random_feasible(spec, 12, rng)) * (1 - 1e-9));
    }
  }
}

TEST(SolveNsw, WarmStartReachesSameOptimum) {
  fp::Rng rng(6);
  const auto spec = fp::PolytopeSpec::full(fp::default_capacity(6, 4));
  for (int rep = 0; rep < 10; ++rep) {
    const auto v = fp::testing::random_matrix(6, 4, rng, 0.05, 1.0);
    fp::NswSolveOptions opts;
    opts.initial = random_feasible(spec, 6, rng);
    const double cold = fp::solve_nsw(fp::ValueMatrix(v), spec).value;
    const double warm = fp::solve_nsw(fp::ValueMatrix(v), spec, opts).value;
    EXPECT_NEAR(warm / cold, 1.0, 1e-6);
  }
}

TEST(SolveNsw, AgreesWithGridOracleOnRandomSmallInstances) {
  fp::Rng rng(77);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t M = 1 + rng.below(3), A = 1 + rng.below(3);
    auto spec = fp::PolytopeSpec::full(fp::default_capacity(M, A));
    const fp::ValueMatrix v(fp::testing::random_matrix(M, A, rng));
    const double ours = fp::solve_nsw(v, spec).value;
    const double ref = fp::solve_nsw_oracle(v, spec, 60).value;
    EXPECT_GE(ours, ref - 1e-9);
    EXPECT_NEAR(ours, ref, 2e-2);
  }
}

TEST(SolveNswOracle, CostGuardAndTrivialCases) {
  EXPECT_THROW(fp::solve_nsw_oracle(fp::ValueMatrix(fp::Matrix(4, 2, 0.5)),
                                    fp::PolytopeSpec::full({2.0, 2.0}), 10),
               fp::CostGuardError);
  const auto one = fp::solve_nsw_oracle(fp::ValueMatrix(mat({{0.2, 0.7, 0.4}})), unit_caps(3), 10);
  EXPECT_NEAR(one.value, 0.7, 1e-12);
  EXPECT_NEAR(one.policy.pi(0, 1), 1.0, 1e-12);
  const auto zero = fp::solve_nsw_oracle(fp::ValueMatrix(fp::Matrix(2, 2, 0.0)), unit_caps(2), 10);
  EXPECT_EQ(zero.value, 0.0);
  EXPECT_TRUE(zero.policy.feasible());
}

TEST(Projector, OutputIsFeasibleAndNearestAmongSamples) {
  fp::Rng rng(91);
  const auto spec = fp::PolytopeSpec::full(fp::default_capacity(7, 4));
  fp::PolytopeProjector proj(spec, 7);
  for (int rep = 0; rep < 50; ++rep) {
    fp::Matrix y = fp::testing::random_matrix(7, 4, rng, -1.5, 2.5);
    fp::Matrix x(7, 4);
    proj.project(y, x);
    const fp::AllocationPolicy p{x, spec.capacity, false};
    EXPECT_TRUE(p.feasible(1e-9)) << p.max_violation();
    double dx = 0.0;
    for (std::size_t n = 0; n < x.data().size(); ++n) dx += std::pow(x.data()[n] - y.data()[n], 2);
    for (int k = 0; k < 20; ++k) {
      const auto z = random_feasible(spec, 7, rng);
      double dz = 0.0;
      for (std::size_t n = 0; n < z.data().size(); ++n) dz += std::pow(z.data()[n] - y.data()[n], 2);
      EXPECT_LE(dx, dz + 1e-9);
    }
  }
}
