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

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "ddtopp/common.hpp"

namespace ddtopp {

// Differential-drive geometry. Wheel limits are stored as linear rim speeds,
// so the wheel radius only matters when converting to or from angular rates.
struct WheelGeometry {
  double track = 0.35;                  // wheel separation d, m
  std::optional<double> wheel_radius;   // m, optional unit conversion only
};

struct BodyVelocity {
  double v = 0.0;      // m/s
  double omega = 0.0;  // rad/s
};

struct WheelSpeeds {
  double v_r = 0.0;  // right wheel linear speed, m/s
  double v_l = 0.0;  // left wheel linear speed, m/s
};

// Box limits on wheel linear speeds. Zero must be interior so that the robot
// can stop.
struct JointLimits {
  double v_r_min = -0.75;
  double v_r_max = 0.75;
  double v_l_min = -0.75;
  double v_l_max = 0.75;

  void validate() const {
    if (!(v_r_min < v_r_max) || !(v_l_min < v_l_max)) {
      throw InvalidArgumentError("joint limits: min must be below max");
    }
    if (v_r_min > 0.0 || v_r_max < 0.0 || v_l_min > 0.0 || v_l_max < 0.0) {
      throw InvalidArgumentError("joint limits: rest (0,0) must be feasible");
    }
  }
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

// Interval [lo, hi] of one scalar velocity component.
struct VelocityInterval {
  double lo = 0.0;
  double hi = 0.0;
};

inline BodyVelocity wheel_to_body(const WheelSpeeds& w,
                                  const WheelGeometry& g) {
  return {0.5 * (w.v_r + w.v_l), (w.v_r - w.v_l) / g.track};
}

inline WheelSpeeds body_to_wheel(const BodyVelocity& b,
                                 const WheelGeometry& g) {
  const double half = 0.5 * b.omega * g.track;
  return {b.v + half, b.v - half};
}

// Range of angular rates reachable at a fixed linear speed with both wheels
// inside their limits. Each wheel contributes one affine bound per side, so
// the extremes are exact minima/maxima of the two candidates.
inline VelocityInterval omega_bounds_for_v(double v_set, const JointLimits& jl,
                                           const WheelGeometry& g) {
  const double s = 2.0 / g.track;
  const double hi = s * std::min(jl.v_r_max - v_set, v_set - jl.v_l_min);
  const double lo = s * std::max(jl.v_r_min - v_set, v_set - jl.v_l_max);
  if (lo > hi + 1e-12) {
    throw InfeasibleError("no feasible angular rate at linear speed " +
                          std::to_string(v_set));
  }
  return {lo, hi};
}

// Range of linear speeds reachable at a fixed angular rate.
inline VelocityInterval v_bounds_for_omega(double omega_set,
                                           const JointLimits& jl,
                                           const WheelGeometry& g) {
  const double half = 0.5 * omega_set * g.track;
  const double hi = std::min(jl.v_r_max - half, jl.v_l_max + half);
  const double lo = std::max(jl.v_r_min - half, jl.v_l_min + half);
  if (lo > hi + 1e-12) {
    throw InfeasibleError("no feasible linear speed at angular rate " +
                          std::to_string(omega_set));
  }
  return {lo, hi};
}

// One piecewise-constant control applied for a positive duration.
struct ControlPiece {
  double v = 0.0;
  double omega = 0.0;
  double duration = 0.0;
};

// Advances a pose under constant (v, omega) using the exact arc solution.
inline Pose advance_pose(const Pose& p, double v, double omega, double dt) {
  Pose out = p;
  if (std::abs(omega) < 1e-12) {
    out.x += v * std::cos(p.theta) * dt;
    out.y += v * std::sin(p.theta) * dt;
  } else {
    const double r = v / omega;
    out.x += r * (std::sin(p.theta + omega * dt) - std::sin(p.theta));
    out.y -= r * (std::cos(p.theta + omega * dt) - std::cos(p.theta));
  }
  out.theta = wrap_angle(p.theta + omega * dt);
  return out;
}

// Integrates a control sequence, returning the pose after each piece.
inline std::vector<Pose> integrate_pose(const Pose& start,
                                        const std::vector<ControlPiece>& u) {
  std::vector<Pose> out;
  out.reserve(u.size());
  Pose p = start;
  for (const ControlPiece& piece : u) {
    if (!(piece.duration > 0.0)) {
      throw InvalidArgumentError("control piece duration must be positive");
    }
    p = advance_pose(p, piece.v, piece.omega, piece.duration);
    out.push_back(p);
  }
  return out;
}

}  // namespace ddtopp
