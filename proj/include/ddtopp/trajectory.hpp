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
//
// Turns solved node speeds back into a timed trajectory, computes performance
// indexes, and re-checks a trajectory against the limits in natural units.

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ddtopp/common.hpp"
#include "ddtopp/discretize.hpp"
#include "ddtopp/kinematics.hpp"
#include "ddtopp/path.hpp"

namespace ddtopp {

// One timed sample. Segment quantities (omega, a, wheel speeds, dt) describe
// the segment starting at this node and are zero on the final row.
struct TrajectoryPoint {
  double t = 0.0;      // s
  double x = 0.0;      // m
  double y = 0.0;      // m
  double theta = 0.0;  // rad
  double v = 0.0;      // m/s, node speed
  double omega = 0.0;  // rad/s, segment
  double a = 0.0;      // m/s^2, segment
  double v_r = 0.0;    // m/s, right wheel over the segment start
  double v_l = 0.0;    // m/s, left wheel over the segment start
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  double t_f = 0.0;  // s

  std::size_t size() const { return points.size(); }
};

// Times the path: each segment is traversed at constant acceleration, so its
// duration is 2 ds / (v_k + v_{k+1}) and the turn rate is dtheta / dt.
inline Trajectory reconstruct(const DiscretizedProblem& p,
                              const PathSamples& path,
                              const std::vector<double>& v) {
  if (path.size() != p.n || v.size() != p.n) {
    throw InvalidArgumentError(
        "reconstruct: path, speeds and problem disagree on the node count");
  }
  Trajectory traj;
  traj.points.resize(p.n);
  double t = 0.0;
  const double half_track = 0.5 * p.limits.geometry.track;
  for (std::size_t k = 0; k < p.n; ++k) {
    TrajectoryPoint& pt = traj.points[k];
    pt.t = t;
    pt.x = path.x[k];
    pt.y = path.y[k];
    pt.theta = path.theta[k];
    pt.v = v[k];
    if (k + 1 < p.n) {
      const double sigma = v[k] + v[k + 1];
      if (!(sigma > 0.0)) {
        throw InvalidArgumentError("reconstruct: stalled segment at index " +
                                   std::to_string(k));
      }
      const double dt = 2.0 * p.ds[k] / sigma;
      pt.omega = p.dtheta[k] / dt;
      pt.a = (v[k + 1] * v[k + 1] - v[k] * v[k]) / (2.0 * p.ds[k]);
      pt.v_r = v[k] + half_track * pt.omega;
      pt.v_l = v[k] - half_track * pt.omega;
      t += dt;
    }
  }
  traj.t_f = t;
  return traj;
}

// Normalized utilization of the limits over a trajectory. A value of 1 means
// some constraint is active somewhere; well below 1 means the limit never
// binds.
struct PerformanceIndexes {
  double zeta = 0.0;  // speed cap utilization
  double rho = 0.0;   // acceleration utilization
  double chi = 0.0;   // turn-rate utilization
};

inline PerformanceIndexes compute_indexes(const DiscretizedProblem& p,
                                          const Trajectory& traj) {
  if (traj.size() != p.n) {
    throw InvalidArgumentError(
        "compute_indexes: trajectory and problem disagree on the node count");
  }
  PerformanceIndexes idx;
  for (std::size_t k = 0; k < p.n; ++k) {
    if (p.vcap[k] > 0.0) {
      idx.zeta = std::max(idx.zeta, traj.points[k].v / p.vcap[k]);
    }
  }
  for (std::size_t k = 0; k + 1 < p.n; ++k) {
    const double a = traj.points[k].a;
    idx.rho = std::max(idx.rho, a >= 0.0 ? a / p.limits.a_max
                                         : a / p.limits.a_min);
    const double omega = traj.points[k].omega;
    // The turn-rate budget at this node combines the commanded band with
    // what the wheel box leaves at the current speed.
    VelocityInterval wheel_band{p.limits.omega_min, p.limits.omega_max};
    try {
      wheel_band = omega_bounds_for_v(traj.points[k].v, p.limits.joint,
                                      p.limits.geometry);
    } catch (const InfeasibleError&) {
      // Speed outside the wheel box entirely; leave the command band so the
      // ratio stays finite. The feasibility check reports the violation.
    }
    const double omega_hi = std::min(wheel_band.hi, p.limits.omega_max);
    const double omega_lo = std::max(wheel_band.lo, p.limits.omega_min);
    if (omega >= 0.0) {
      if (std::abs(omega) > 1e-12 || std::abs(omega_hi) > 1e-12) {
        idx.chi = std::max(idx.chi, omega / std::max(omega_hi, 1e-12));
      }
    } else {
      if (std::abs(omega_lo) > 1e-12) {
        idx.chi = std::max(idx.chi, omega / std::min(omega_lo, -1e-12));
      }
    }
  }
  return idx;
}

// A single limit violation found by the feasibility check.
struct Violation {
  std::size_t index = 0;  // node or segment index
  std::string family;     // velocity-cap, acceleration, angular, joint,
                          // boundary, consistency
  double magnitude = 0.0; // how far past the limit, natural units
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<Violation> violations;
  double tolerance = 0.0;

  void add(std::size_t index, const std::string& family, double magnitude) {
    feasible = false;
    violations.push_back({index, family, magnitude});
  }
};

// Re-evaluates every limit in natural units (speeds in m/s, accelerations in
// m/s^2, turn rates in rad/s) from the trajectory's node speeds. Violations
// beyond `tol` are reported as data, not exceptions.
inline FeasibilityReport check_feasibility(const DiscretizedProblem& p,
                                           const Trajectory& traj,
                                           double tol = 1e-6) {
  if (traj.size() != p.n) {
    throw InvalidArgumentError(
        "check_feasibility: trajectory and problem disagree on node count");
  }
  FeasibilityReport report;
  report.tolerance = tol;
  const double half_track = 0.5 * p.limits.geometry.track;

  for (std::size_t k = 0; k < p.n; ++k) {
    const double v = traj.points[k].v;
    if (v < -tol) report.add(k, "velocity-cap", -v);
    if (v > p.vcap[k] + tol) report.add(k, "velocity-cap", v - p.vcap[k]);
  }
  for (std::size_t k = 0; k + 1 < p.n; ++k) {
    const double vk = traj.points[k].v;
    const double vk1 = traj.points[k + 1].v;
    const double sigma = vk + vk1;
    if (!(sigma > 0.0)) {
      report.add(k, "consistency", -sigma);
      continue;
    }
    const double a = (vk1 * vk1 - vk * vk) / (2.0 * p.ds[k]);
    if (a > p.limits.a_max + tol) report.add(k, "acceleration",
                                             a - p.limits.a_max);
    if (a < p.limits.a_min - tol) report.add(k, "acceleration",
                                             p.limits.a_min - a);
    const double omega = p.dtheta[k] * sigma / (2.0 * p.ds[k]);
    if (p.angular_active[k]) {
      if (omega > p.limits.omega_max + tol) {
        report.add(k, "angular", omega - p.limits.omega_max);
      }
      if (omega < p.limits.omega_min - tol) {
        report.add(k, "angular", p.limits.omega_min - omega);
      }
    }
    if (p.joint_active[k]) {
      const JointLimits& jl = p.limits.joint;
      const auto check_wheel = [&](double value, double lo, double hi) {
        if (value > hi + tol) report.add(k, "joint", value - hi);
        if (value < lo - tol) report.add(k, "joint", lo - value);
      };
      check_wheel(vk + half_track * omega, jl.v_r_min, jl.v_r_max);
      check_wheel(vk - half_track * omega, jl.v_l_min, jl.v_l_max);
      if (p.strict_joint) {
        check_wheel(vk1 + half_track * omega, jl.v_r_min, jl.v_r_max);
        check_wheel(vk1 - half_track * omega, jl.v_l_min, jl.v_l_max);
      }
    }
    // Stored segment columns must agree with what the node speeds imply.
    const double dt = 2.0 * p.ds[k] / sigma;
    const TrajectoryPoint& pt = traj.points[k];
    const double dt_stored = traj.points[k + 1].t - pt.t;
    if (std::abs(dt_stored - dt) > tol) {
      report.add(k, "consistency", std::abs(dt_stored - dt));
    }
    if (std::abs(pt.omega - omega) > tol) {
      report.add(k, "consistency", std::abs(pt.omega - omega));
    }
    if (std::abs(pt.a - a) > tol) {
      report.add(k, "consistency", std::abs(pt.a - a));
    }
  }

  // Boundary states.
  if (std::abs(traj.points.front().v - p.boundary.v_s) > 1e-9) {
    report.add(0, "boundary",
               std::abs(traj.points.front().v - p.boundary.v_s));
  }
  if (std::abs(traj.points.back().v - p.boundary.v_f) > 1e-9) {
    report.add(p.n - 1, "boundary",
               std::abs(traj.points.back().v - p.boundary.v_f));
  }
  const BoundaryPins pins = boundary_pins(p);
  if (pins.pin_second &&
      std::abs(traj.points[1].v - pins.second_value) > tol) {
    report.add(1, "boundary", std::abs(traj.points[1].v - pins.second_value));
  }
  if (pins.pin_second_last &&
      std::abs(traj.points[p.n - 2].v - pins.second_last_value) > tol) {
    report.add(p.n - 2, "boundary",
               std::abs(traj.points[p.n - 2].v - pins.second_last_value));
  }
  return report;
}

}  // namespace ddtopp
