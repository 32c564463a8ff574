// Copyright 2026 The ddtopp Authors
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

#include "ddtopp/dp_oracle.hpp"

#include <cmath>
#include <cstddef>

#include <gtest/gtest.h>

#include "ddtopp/common.hpp"
#include "ddtopp/discretize.hpp"
#include "ddtopp/path.hpp"
#include "ddtopp/solver.hpp"

namespace ddtopp {
namespace {

PathSamples straight_samples(std::size_t n, double length) {
  PathSamples out;
  out.resolution = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.x.push_back(length * static_cast<double>(i) /
                    static_cast<double>(n - 1));
    out.y.push_back(0.0);
    out.theta.push_back(0.0);
    out.kappa.push_back(0.0);
  }
  return out;
}

PathSamples arc_samples(double r, double phi0, double phi1, std::size_t n) {
  PathSamples out;
  out.resolution = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double phi =
        phi0 + (phi1 - phi0) * static_cast<double>(i) /
                   static_cast<double>(n - 1);
    out.x.push_back(r * std::cos(phi));
    out.y.push_back(r * std::sin(phi));
    out.theta.push_back(wrap_angle(phi + 0.5 * kPi));
    out.kappa.push_back(1.0 / r);
  }
  return out;
}

// Rest-to-rest trapezoid whose speeds all fall exactly on the grid: zero at
// the ends, the cap everywhere else. The grid profile is then exact.
TEST(DpOracleTest, GridAlignedTrapezoidIsExact) {
  const PathSamples traj = straight_samples(9, 1.0);
  Limits lim;
  lim.v_max = 0.5;
  const DiscretizedProblem p = assemble(traj, lim, BoundaryConditions{});
  DpOracleOptions opt;
  opt.levels = 10;
  const DpOracleResult dp = dp_reference(p, opt);
  ASSERT_TRUE(dp.feasible);
  EXPECT_NEAR(dp.t_f, 2.5, 1e-9);
  EXPECT_DOUBLE_EQ(dp.v[0], 0.0);
  EXPECT_DOUBLE_EQ(dp.v[1], 0.5);
  EXPECT_DOUBLE_EQ(dp.v[8], 0.0);
}

TEST(DpOracleTest, TriangleProfileApproachesClosedForm) {
  const PathSamples traj = straight_samples(11, 1.0);
  Limits lim;
  lim.v_max = 2.0;
  AssembleOptions aopt;
  aopt.disable_joint = true;
  const DiscretizedProblem p =
      assemble(traj, lim, BoundaryConditions{}, aopt);
  DpOracleOptions opt;
  opt.levels = 1000;
  const DpOracleResult dp = dp_reference(p, opt);
  ASSERT_TRUE(dp.feasible);
  EXPECT_GE(dp.t_f, 2.0 - 1e-9);  // grid profiles cannot beat the optimum
  EXPECT_LE(dp.t_f, 2.0 * 1.01);
}

// The grid optimum brackets the conic optimum from above, and the gap
// closes as the grid refines.
TEST(DpOracleTest, BracketsTheConicOptimumFromAbove) {
  const PathSamples traj = arc_samples(0.25, 0.0, kPi, 41);
  const DiscretizedProblem p = assemble(traj, Limits{}, BoundaryConditions{});
  const Solution sol = solve(p);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  DpOracleOptions opt;
  opt.levels = 300;
  const DpOracleResult dp = dp_reference(p, opt);
  ASSERT_TRUE(dp.feasible);
  EXPECT_GE(dp.t_f, sol.objective_value - 1e-9);
  EXPECT_LE(dp.t_f, sol.objective_value * 1.02);
}

TEST(DpOracleTest, AgreesWithSolverWhenTurnRateBinds) {
  const PathSamples traj = arc_samples(0.1, 0.0, kPi, 41);
  const DiscretizedProblem p = assemble(traj, Limits{}, BoundaryConditions{});
  const Solution sol = solve(p);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  DpOracleOptions opt;
  opt.levels = 400;
  const DpOracleResult dp = dp_reference(p, opt);
  ASSERT_TRUE(dp.feasible);
  EXPECT_GE(dp.t_f, sol.objective_value - 1e-9);
  EXPECT_LE(dp.t_f, sol.objective_value * 1.02);
}

TEST(DpOracleTest, PinnedSecondNodeStaysNearThePin) {
  const PathSamples traj = arc_samples(2.0, 0.0, 0.5 * kPi, 16);
  BoundaryConditions bc;
  bc.v_s = 0.2;
  bc.omega_s = 0.1;
  const DiscretizedProblem p = assemble(traj, Limits{}, bc);
  const BoundaryPins pins = boundary_pins(p);
  ASSERT_TRUE(pins.pin_second);
  DpOracleOptions opt;
  opt.levels = 200;
  const DpOracleResult dp = dp_reference(p, opt);
  ASSERT_TRUE(dp.feasible);
  const double step = p.vcap[1] / 200.0;
  EXPECT_NEAR(dp.v[1], pins.second_value, step + 1e-12);
}

TEST(DpOracleTest, SingleRestToRestSegmentHasNoProfile) {
  const PathSamples traj = straight_samples(2, 1.0);
  const DiscretizedProblem p = assemble(traj, Limits{}, BoundaryConditions{});
  const DpOracleResult dp = dp_reference(p);
  EXPECT_FALSE(dp.feasible);
}

TEST(DpOracleTest, RejectsOversizedGrids) {
  const PathSamples traj = straight_samples(3, 1.0);
  const DiscretizedProblem p = assemble(traj, Limits{}, BoundaryConditions{});
  DpOracleOptions opt;
  opt.levels = 50;
  opt.max_edges = 1000.0;
  EXPECT_THROW(dp_reference(p, opt), InvalidArgumentError);
  opt.levels = 0;
  EXPECT_THROW(dp_reference(p, opt), InvalidArgumentError);
}

}  // namespace
}  // namespace ddtopp
