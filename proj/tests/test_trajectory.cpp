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

#include "ddtopp/trajectory.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

#include <gtest/gtest.h>

#include "ddtopp/common.hpp"
#include "ddtopp/discretize.hpp"
#include "ddtopp/kinematics.hpp"
#include "ddtopp/path.hpp"
#include "ddtopp/solver.hpp"

namespace ddtopp {
namespace {

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

// Hand-built three-node path: one gentle turn then a straight segment, with
// speeds chosen so every segment quantity is easy to verify by hand.
struct HandProblem {
  DiscretizedProblem p;
  PathSamples path;
  std::vector<double> v;
};

HandProblem hand_problem() {
  HandProblem out;
  out.path.resolution = 1.0;
  out.path.x = {0.0, 0.3, 0.6};
  out.path.y = {0.0, 0.0, 0.0};
  out.path.theta = {0.0, 0.3, 0.3};
  out.path.kappa = {0.0, 0.0, 0.0};
  Limits lim;
  BoundaryConditions bc;
  bc.v_s = 0.2;
  bc.v_f = 0.4;
  bc.omega_s = 0.3;  // consistent with v = (0.2, 0.4) on the first segment
  bc.omega_f = 0.0;
  out.p = assemble(out.path, lim, bc);
  out.v = {0.2, 0.4, 0.4};
  return out;
}

TEST(ReconstructTest, SegmentQuantitiesMatchHandArithmetic) {
  const HandProblem hp = hand_problem();
  const Trajectory traj = reconstruct(hp.p, hp.path, hp.v);
  ASSERT_EQ(traj.size(), 3u);

  // dt = 2 * 0.3 / (0.2 + 0.4) = 1, omega = 0.3 / 1, a = (0.16 - 0.04) / 0.6
  EXPECT_NEAR(traj.points[0].t, 0.0, 1e-15);
  EXPECT_NEAR(traj.points[1].t, 1.0, 1e-12);
  EXPECT_NEAR(traj.points[0].omega, 0.3, 1e-12);
  EXPECT_NEAR(traj.points[0].a, 0.2, 1e-12);
  EXPECT_NEAR(traj.points[0].v_r, 0.2 + 0.175 * 0.3, 1e-12);
  EXPECT_NEAR(traj.points[0].v_l, 0.2 - 0.175 * 0.3, 1e-12);

  // second segment: straight cruise at 0.4
  EXPECT_NEAR(traj.points[1].omega, 0.0, 1e-12);
  EXPECT_NEAR(traj.points[1].a, 0.0, 1e-12);
  EXPECT_NEAR(traj.points[2].t, 1.75, 1e-12);
  EXPECT_NEAR(traj.t_f, 1.75, 1e-12);

  // final row carries no segment data
  EXPECT_DOUBLE_EQ(traj.points[2].omega, 0.0);
  EXPECT_DOUBLE_EQ(traj.points[2].a, 0.0);
  EXPECT_DOUBLE_EQ(traj.points[2].v_r, 0.0);
  EXPECT_DOUBLE_EQ(traj.points[2].v_l, 0.0);
}

TEST(ReconstructTest, WheelSpeedsAreConsistentWithBodyMotion) {
  const PathSamples path = arc_samples(0.25, 0.0, kPi, 41);
  const DiscretizedProblem p = assemble(path, Limits{}, BoundaryConditions{});
  const Solution sol = solve(p);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  const Trajectory traj = reconstruct(p, path, sol.v);
  const double track = p.limits.geometry.track;
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    const TrajectoryPoint& pt = traj.points[k];
    EXPECT_NEAR((pt.v_r + pt.v_l) / 2.0, pt.v, 1e-12);
    EXPECT_NEAR((pt.v_r - pt.v_l) / track, pt.omega, 1e-12);
  }
}

TEST(ReconstructTest, SegmentTimesAddUp) {
  const PathSamples path = arc_samples(0.25, 0.0, kPi, 41);
  const DiscretizedProblem p = assemble(path, Limits{}, BoundaryConditions{});
  const Solution sol = solve(p);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  const Trajectory traj = reconstruct(p, path, sol.v);
  double t = 0.0;
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    t += 2.0 * p.ds[k] / (sol.v[k] + sol.v[k + 1]);
  }
  EXPECT_NEAR(traj.t_f, t, 1e-12);
  EXPECT_NEAR(traj.points.back().t, traj.t_f, 1e-12);
  // cone tightness makes the timed length equal the conic objective
  EXPECT_NEAR(traj.t_f, sol.objective_value, 1e-6);
}

// Driving each segment's constant turn rate and mean speed for its duration
// should land near the next sample; over the whole path the error stays a
// small fraction of the length.
TEST(ReconstructTest, CommandsReplayCloseToThePath) {
  const PathSamples path = arc_samples(0.5, 0.2, 0.2 + kPi, 51);
  const DiscretizedProblem p = assemble(path, Limits{}, BoundaryConditions{});
  const Solution sol = solve(p);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  const Trajectory traj = reconstruct(p, path, sol.v);
  Pose pose{path.x[0], path.y[0], path.theta[0]};
  double length = 0.0;
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    const double dt = traj.points[k + 1].t - traj.points[k].t;
    const double v_mean = p.ds[k] / dt;
    pose = advance_pose(pose, v_mean, traj.points[k].omega, dt);
    length += p.ds[k];
  }
  const double err = std::hypot(pose.x - path.x.back(), pose.y - path.y.back());
  EXPECT_LT(err, 0.02 * length);
}

TEST(ReconstructTest, StalledSegmentIsRejected) {
  const HandProblem hp = hand_problem();
  std::vector<double> v = {0.0, 0.0, 0.4};
  EXPECT_THROW(reconstruct(hp.p, hp.path, v), InvalidArgumentError);
  std::vector<double> short_v = {0.2, 0.4};
  EXPECT_THROW(reconstruct(hp.p, hp.path, short_v), InvalidArgumentError);
}

TEST(IndexesTest, UtilizationRatiosMatchHandValues) {
  const HandProblem hp = hand_problem();
  const Trajectory traj = reconstruct(hp.p, hp.path, hp.v);
  const PerformanceIndexes idx = compute_indexes(hp.p, traj);
  // fastest node runs at 0.4 of the 0.6 cap
  EXPECT_NEAR(idx.zeta, 0.4 / 0.6, 1e-12);
  // the only acceleration is 0.2 against a_max = 1
  EXPECT_NEAR(idx.rho, 0.2, 1e-12);
  // omega = 0.3 against the command band edge 2 (the wheel box allows more)
  EXPECT_NEAR(idx.chi, 0.15, 1e-12);
}

TEST(IndexesTest, BrakingCountsAgainstTheLowerBound) {
  const HandProblem hp = hand_problem();
  DiscretizedProblem p = hp.p;
  p.boundary.v_s = 0.4;
  p.boundary.v_f = 0.2;
  p.boundary.omega_s = 0.3;  // consistent with v = (0.4, 0.2)
  PathSamples path = hp.path;
  const std::vector<double> v = {0.4, 0.2, 0.2};
  const Trajectory traj = reconstruct(p, path, v);
  ASSERT_LT(traj.points[0].a, 0.0);
  const PerformanceIndexes idx = compute_indexes(p, traj);
  // a = (0.04 - 0.16) / 0.6 = -0.2 against a_min = -1
  EXPECT_NEAR(idx.rho, 0.2, 1e-12);
}

TEST(IndexesTest, WheelBoxTightensTheTurnBudget) {
  // At v = 0.7 the right wheel cap 0.75 leaves omega <= 2/0.35 * 0.05,
  // far below the commanded band edge of 2.
  PathSamples path;
  path.resolution = 1.0;
  path.x = {0.0, 0.5, 1.0};
  path.y = {0.0, 0.0, 0.0};
  path.theta = {0.0, 0.1, 0.2};
  path.kappa = {0.0, 0.0, 0.0};
  Limits lim;
  lim.v_max = 1.0;
  BoundaryConditions bc;
  bc.v_s = 0.7;
  bc.v_f = 0.7;
  const double h = 2.0 * 0.5 / 0.1;
  bc.omega_s = 2.0 * 0.7 / h;  // consistent with constant speed 0.7
  bc.omega_f = 2.0 * 0.7 / h;
  AssembleOptions opt;
  opt.disable_joint = true;  // the plan ignores wheels, the index does not
  const DiscretizedProblem p = assemble(path, lim, bc, opt);
  const std::vector<double> v = {0.7, 0.7, 0.7};
  const Trajectory traj = reconstruct(p, path, v);
  const PerformanceIndexes idx = compute_indexes(p, traj);
  const double omega = traj.points[0].omega;
  const double budget = (2.0 / 0.35) * (0.75 - 0.7);
  EXPECT_NEAR(idx.chi, omega / budget, 1e-9);
  EXPECT_GT(idx.chi, omega / 2.0);
}

TEST(FeasibilityTest, CleanTrajectoryPasses) {
  const HandProblem hp = hand_problem();
  const Trajectory traj = reconstruct(hp.p, hp.path, hp.v);
  const FeasibilityReport report = check_feasibility(hp.p, traj);
  EXPECT_TRUE(report.feasible);
  EXPECT_TRUE(report.violations.empty());
}

TEST(FeasibilityTest, FlagsSpeedAboveTheCap) {
  const HandProblem hp = hand_problem();
  Trajectory traj = reconstruct(hp.p, hp.path, hp.v);
  traj.points[1].v = 0.7;  // cap is 0.6
  const FeasibilityReport report = check_feasibility(hp.p, traj);
  EXPECT_FALSE(report.feasible);
  bool found = false;
  for (const Violation& violation : report.violations) {
    if (violation.family == "velocity-cap" && violation.index == 1) {
      found = true;
      EXPECT_NEAR(violation.magnitude, 0.1, 1e-9);
    }
  }
  EXPECT_TRUE(found);
}

TEST(FeasibilityTest, FlagsExcessiveAcceleration) {
  const HandProblem hp = hand_problem();
  DiscretizedProblem p = hp.p;
  p.limits.a_max = 0.1;  // the hand profile accelerates at 0.2
  const Trajectory traj = reconstruct(p, hp.path, hp.v);
  const FeasibilityReport report = check_feasibility(p, traj);
  EXPECT_FALSE(report.feasible);
  bool found = false;
  for (const Violation& violation : report.violations) {
    if (violation.family == "acceleration" && violation.index == 0) {
      found = true;
      EXPECT_NEAR(violation.magnitude, 0.1, 1e-9);
    }
  }
  EXPECT_TRUE(found);
}

TEST(FeasibilityTest, FlagsInconsistentStoredColumns) {
  const HandProblem hp = hand_problem();
  Trajectory traj = reconstruct(hp.p, hp.path, hp.v);
  traj.points[0].omega += 0.01;
  const FeasibilityReport report = check_feasibility(hp.p, traj);
  EXPECT_FALSE(report.feasible);
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.violations[0].family, "consistency");
}

TEST(FeasibilityTest, FlagsBoundaryMismatch) {
  const HandProblem hp = hand_problem();
  Trajectory traj = reconstruct(hp.p, hp.path, hp.v);
  traj.points[0].v = 0.25;
  const FeasibilityReport report = check_feasibility(hp.p, traj);
  EXPECT_FALSE(report.feasible);
  bool found = false;
  for (const Violation& violation : report.violations) {
    if (violation.family == "boundary" && violation.index == 0) found = true;
  }
  EXPECT_TRUE(found);
}

TEST(FeasibilityTest, FlagsWheelSpeedExcess) {
  PathSamples path = arc_samples(0.2, 0.0, 0.5 * kPi, 11);
  const DiscretizedProblem p = assemble(path, Limits{}, BoundaryConditions{});
  const Solution sol = solve(p);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  Trajectory traj = reconstruct(p, path, sol.v);
  // push an interior node well past what the wheel box allows
  DiscretizedProblem tight = p;
  tight.limits.joint.v_r_max = 0.1;
  const FeasibilityReport report = check_feasibility(tight, traj);
  EXPECT_FALSE(report.feasible);
  bool found = false;
  for (const Violation& violation : report.violations) {
    if (violation.family == "joint") found = true;
  }
  EXPECT_TRUE(found);
}

}  // namespace
}  // namespace ddtopp
