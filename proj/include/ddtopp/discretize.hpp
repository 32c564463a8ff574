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
// Turns a sampled path plus velocity/acceleration/joint limits into the data
// of a conic speed-planning problem over squared node speeds: per-node speed
// caps, per-segment acceleration, turn-rate and wheel-speed coefficients, and
// boundary conditions.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ddtopp/common.hpp"
#include "ddtopp/kinematics.hpp"
#include "ddtopp/path.hpp"

namespace ddtopp {

// Body-level motion limits.
struct Limits {
  double v_max = 0.6;       // m/s
  double a_min = -1.0;      // m/s^2
  double a_max = 1.0;       // m/s^2
  double a_n_max = 0.6;     // m/s^2, centripetal
  double omega_min = -2.0;  // rad/s
  double omega_max = 2.0;   // rad/s
  JointLimits joint;
  WheelGeometry geometry;

  void validate() const {
    if (!(v_max > 0.0)) {
      throw InvalidArgumentError("limits: v_max must be positive");
    }
    if (!(a_min < 0.0) || !(a_max > 0.0)) {
      throw InvalidArgumentError("limits: need a_min < 0 < a_max");
    }
    if (!(a_n_max > 0.0)) {
      throw InvalidArgumentError("limits: a_n_max must be positive");
    }
    if (!(omega_min < 0.0) || !(omega_max > 0.0)) {
      throw InvalidArgumentError("limits: need omega_min < 0 < omega_max");
    }
    if (!(geometry.track > 0.0)) {
      throw InvalidArgumentError("limits: wheel track must be positive");
    }
    joint.validate();
  }
};

// Start and end states of the profile.
struct BoundaryConditions {
  double v_s = 0.0;      // m/s
  double v_f = 0.0;      // m/s
  double omega_s = 0.0;  // rad/s
  double omega_f = 0.0;  // rad/s
};

struct AssembleOptions {
  bool disable_angular = false;  // drop turn-rate band constraints
  bool disable_joint = false;    // drop wheel-speed constraints
  bool strict_joint = false;     // also bound wheel speeds at segment ends
  double eps_ds = 1e-6;          // m, segments below this are degenerate
  double eps_dtheta = 1e-6;      // rad, below this a segment is straight
};

// Complete data of the discrete speed-planning problem. With node speeds v_k
// and per-segment slacks c_k, the program is
//
//   minimize    sum_k 2 ds_k c_k
//   subject to  0 <= v_k <= vcap_k
//               v_{k+1} - v_k <= abar_k c_k
//               v_k - v_{k+1} <= -aunder_k c_k
//               wunder_k <= v_k + v_{k+1} <= wbar_k       (angular_active)
//               (1+g_k) v_k + g_k v_{k+1} in wheel box    (joint_active)
//               (1-g_k) v_k - g_k v_{k+1} in wheel box    (joint_active)
//               c_k (v_k + v_{k+1}) >= 1                  (rotated cone)
//               boundary equalities on v_0, v_{n-1} and segment turn rates
struct DiscretizedProblem {
  std::size_t n = 0;  // node count

  // Per segment, size n-1.
  std::vector<double> ds;        // m
  std::vector<double> dtheta;    // rad, wrapped
  std::vector<double> abar;      // m^2/s^2, 2 ds a_max
  std::vector<double> aunder;    // m^2/s^2, 2 ds a_min
  std::vector<double> h;         // m/rad, 2 ds / dtheta (0 when straight)
  std::vector<double> wbar;      // m/s, upper band edge
  std::vector<double> wunder;    // m/s, lower band edge
  std::vector<double> g;         // dimensionless wheel coupling
  std::vector<bool> angular_active;
  std::vector<bool> joint_active;

  // Per node, size n.
  std::vector<double> vcap;  // m/s

  BoundaryConditions boundary;
  Limits limits;
  bool strict_joint = false;
};

// Chord lengths and wrapped heading increments between consecutive samples.
inline void segment_quantities(const PathSamples& traj,
                               std::vector<double>& ds,
                               std::vector<double>& dtheta,
                               double eps_ds = 1e-6) {
  traj.validate();
  const std::size_t n = traj.size();
  ds.resize(n - 1);
  dtheta.resize(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double dx = traj.x[k + 1] - traj.x[k];
    const double dy = traj.y[k + 1] - traj.y[k];
    ds[k] = std::hypot(dx, dy);
    if (ds[k] < eps_ds) {
      throw DegenerateError("near-coincident samples at index " +
                            std::to_string(k));
    }
    dtheta[k] = wrap_angle(traj.theta[k + 1] - traj.theta[k]);
  }
}

// Drops samples closer than eps_ds to their predecessor. The endpoints are
// always kept; dropping the second-to-last sample in favor of the last one
// preserves the path's end.
inline PathSamples merge_coincident(const PathSamples& traj,
                                    double eps_ds = 1e-6) {
  traj.validate();
  PathSamples out;
  out.resolution = traj.resolution;
  const std::size_t n = traj.size();
  auto push = [&](std::size_t i) {
    out.x.push_back(traj.x[i]);
    out.y.push_back(traj.y[i]);
    out.theta.push_back(traj.theta[i]);
    out.kappa.push_back(traj.kappa[i]);
  };
  push(0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double d = std::hypot(traj.x[i] - out.x.back(),
                                traj.y[i] - out.y.back());
    if (d >= eps_ds) push(i);
  }
  // Keep the final sample; if its predecessor crowds it, drop that one.
  const double dlast = std::hypot(traj.x[n - 1] - out.x.back(),
                                  traj.y[n - 1] - out.y.back());
  if (dlast < eps_ds && out.size() > 1) {
    out.x.pop_back();
    out.y.pop_back();
    out.theta.pop_back();
    out.kappa.pop_back();
  }
  push(n - 1);
  return out;
}

// Per-node speed cap: the lower of the global cap and the centripetal limit.
inline std::vector<double> velocity_caps(const PathSamples& traj,
                                         const Limits& lim) {
  lim.validate();
  traj.validate();
  std::vector<double> vcap(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    vcap[k] = traj.kappa[k] > 0.0
                  ? std::min(lim.v_max, std::sqrt(lim.a_n_max / traj.kappa[k]))
                  : lim.v_max;
  }
  return vcap;
}

// Acceleration bounds scaled into squared-speed differences.
inline void accel_coeffs(const std::vector<double>& ds, const Limits& lim,
                         std::vector<double>& abar,
                         std::vector<double>& aunder) {
  lim.validate();
  abar.resize(ds.size());
  aunder.resize(ds.size());
  for (std::size_t k = 0; k < ds.size(); ++k) {
    abar[k] = 2.0 * ds[k] * lim.a_max;
    aunder[k] = 2.0 * ds[k] * lim.a_min;
  }
}

// Turn-rate band on v_k + v_{k+1}. The scale h_k = 2 ds_k / dtheta_k carries
// the sign of the heading change, so the band edges are sorted with min/max.
// Straight segments carry no constraint.
inline void omega_coeffs(const std::vector<double>& ds,
                         const std::vector<double>& dtheta, const Limits& lim,
                         double eps_dtheta, std::vector<double>& h,
                         std::vector<double>& wbar,
                         std::vector<double>& wunder,
                         std::vector<bool>& angular_active) {
  lim.validate();
  const std::size_t m = ds.size();
  h.assign(m, 0.0);
  wbar.assign(m, 0.0);
  wunder.assign(m, 0.0);
  angular_active.assign(m, false);
  for (std::size_t k = 0; k < m; ++k) {
    if (std::abs(dtheta[k]) < eps_dtheta) continue;
    h[k] = 2.0 * ds[k] / dtheta[k];
    wbar[k] = std::max(h[k] * lim.omega_max, h[k] * lim.omega_min);
    wunder[k] = std::min(h[k] * lim.omega_max, h[k] * lim.omega_min);
    angular_active[k] = true;
  }
}

// Wheel-speed coupling coefficient g_k = track * dtheta_k / (4 ds_k).
inline std::vector<double> joint_coeffs(const std::vector<double>& ds,
                                        const std::vector<double>& dtheta,
                                        const WheelGeometry& geometry) {
  std::vector<double> g(ds.size());
  for (std::size_t k = 0; k < ds.size(); ++k) {
    if (!(ds[k] > 0.0)) {
      throw InvalidArgumentError("joint coefficients: ds must be positive");
    }
    g[k] = geometry.track * dtheta[k] / (4.0 * ds[k]);
  }
  return g;
}

// Boundary turn-rate equalities reduce to pinned node speeds: on a turning
// first segment, omega_s fixes v_0 + v_1 and therefore v_1. Same at the end.
struct BoundaryPins {
  bool pin_second = false;        // v_1 = second_value
  double second_value = 0.0;
  bool pin_second_last = false;   // v_{n-2} = second_last_value
  double second_last_value = 0.0;
};

// Threshold below which a rest boundary (v and omega both zero) is treated
// as exactly at rest.
inline constexpr double kEpsRestBoundary = 1e-12;

// Derives the pinned node speeds implied by the boundary turn rates.
//
// A segment's turn rate is dtheta_k / (2 ds_k) * (v_k + v_{k+1}), so a
// boundary turn rate on a turning end segment fixes the adjacent node speed.
// The exception is a full-rest boundary (v and omega both zero): the segment
// then starts at zero speed with undefined instantaneous turn rate, and
// pinning would force v_0 + v_1 = 0, which contradicts the cone constraint.
// Such boundaries leave the adjacent node free.
//
// Pins only ever target strictly interior nodes. With two nodes both are
// boundary-fixed and the turn-rate equalities reduce to consistency checks,
// which check_boundary performs directly.
inline BoundaryPins boundary_pins(const DiscretizedProblem& p) {
  BoundaryPins pins;
  if (p.n < 3) return pins;
  const std::size_t last = p.n - 2;  // final segment index
  const BoundaryConditions& bc = p.boundary;

  const bool rest_start = std::abs(bc.v_s) < kEpsRestBoundary &&
                          std::abs(bc.omega_s) < kEpsRestBoundary;
  if (p.angular_active.front() && !rest_start) {
    pins.pin_second = true;
    pins.second_value = p.h.front() * bc.omega_s - bc.v_s;
  }

  const bool rest_end = std::abs(bc.v_f) < kEpsRestBoundary &&
                        std::abs(bc.omega_f) < kEpsRestBoundary;
  if (p.angular_active[last] && !rest_end) {
    pins.pin_second_last = true;
    pins.second_last_value = p.h[last] * bc.omega_f - bc.v_f;
  }
  return pins;
}

// Validates boundary data against the assembled problem. Throws
// InfeasibleError with a description of the failing condition.
inline void check_boundary(const DiscretizedProblem& p) {
  const BoundaryConditions& bc = p.boundary;
  const Limits& lim = p.limits;
  if (bc.v_s < 0.0 || bc.v_s > p.vcap.front() + 1e-12) {
    throw InfeasibleError(
        "boundary-infeasible: start speed outside [0, vcap] (boundary states "
        "must lie within the problem limits)");
  }
  if (bc.v_f < 0.0 || bc.v_f > p.vcap.back() + 1e-12) {
    throw InfeasibleError(
        "boundary-infeasible: final speed outside [0, vcap]");
  }
  if (bc.omega_s < lim.omega_min - 1e-12 ||
      bc.omega_s > lim.omega_max + 1e-12 ||
      bc.omega_f < lim.omega_min - 1e-12 ||
      bc.omega_f > lim.omega_max + 1e-12) {
    throw InfeasibleError("boundary-infeasible: boundary turn rate outside "
                          "[omega_min, omega_max]");
  }
  // A straight end segment has zero turn rate regardless of which constraint
  // families are enabled; requesting otherwise cannot be satisfied. h_k is
  // zero exactly on straight segments.
  if (p.h.front() == 0.0 && std::abs(bc.omega_s) > 1e-9) {
    throw InfeasibleError("boundary-infeasible: nonzero start turn rate on a "
                          "straight first segment");
  }
  if (p.h[p.n - 2] == 0.0 && std::abs(bc.omega_f) > 1e-9) {
    throw InfeasibleError("boundary-infeasible: nonzero final turn rate on a "
                          "straight last segment");
  }

  const BoundaryPins pins = boundary_pins(p);
  if (pins.pin_second) {
    if (pins.second_value < -1e-12 ||
        pins.second_value > p.vcap[1] + 1e-12) {
      throw InfeasibleError("boundary-infeasible: start turn rate implies a "
                            "second-node speed outside [0, vcap]");
    }
    if (bc.v_s + pins.second_value <= 0.0) {
      throw InfeasibleError("boundary-infeasible: start turn rate stalls the "
                            "first segment");
    }
  }
  if (pins.pin_second_last) {
    if (pins.second_last_value < -1e-12 ||
        pins.second_last_value > p.vcap[p.n - 2] + 1e-12) {
      throw InfeasibleError("boundary-infeasible: final turn rate implies a "
                            "speed outside [0, vcap]");
    }
    if (bc.v_f + pins.second_last_value <= 0.0) {
      throw InfeasibleError("boundary-infeasible: final turn rate stalls the "
                            "last segment");
    }
  }
  // With three nodes the two pins target the same variable.
  if (p.n == 3 && pins.pin_second && pins.pin_second_last &&
      std::abs(pins.second_value - pins.second_last_value) > 1e-9) {
    throw InfeasibleError("boundary-infeasible: start and final turn rates "
                          "pin the middle node to different speeds");
  }
  // With two nodes both node speeds are boundary data and the turn-rate
  // equalities become plain consistency conditions on the single segment.
  if (p.n == 2 && p.angular_active.front()) {
    const double sigma = bc.v_s + bc.v_f;
    const double omega = p.dtheta.front() * sigma / (2.0 * p.ds.front());
    const bool rest_start = std::abs(bc.v_s) < kEpsRestBoundary &&
                            std::abs(bc.omega_s) < kEpsRestBoundary;
    const bool rest_end = std::abs(bc.v_f) < kEpsRestBoundary &&
                          std::abs(bc.omega_f) < kEpsRestBoundary;
    if (!rest_start && std::abs(omega - bc.omega_s) > 1e-9) {
      throw InfeasibleError("boundary-infeasible: start turn rate is "
                            "inconsistent with the single segment");
    }
    if (!rest_end && std::abs(omega - bc.omega_f) > 1e-9) {
      throw InfeasibleError("boundary-infeasible: final turn rate is "
                            "inconsistent with the single segment");
    }
  }
}

// Assembles the full problem. Throws InfeasibleError for boundary data that
// cannot be met and DegenerateError for degenerate geometry.
inline DiscretizedProblem assemble(const PathSamples& traj, const Limits& lim,
                                   const BoundaryConditions& bc,
                                   const AssembleOptions& opt = {}) {
  lim.validate();
  DiscretizedProblem p;
  p.n = traj.size();
  p.boundary = bc;
  p.limits = lim;
  p.strict_joint = opt.strict_joint;
  segment_quantities(traj, p.ds, p.dtheta, opt.eps_ds);
  p.vcap = velocity_caps(traj, lim);
  accel_coeffs(p.ds, lim, p.abar, p.aunder);
  omega_coeffs(p.ds, p.dtheta, lim, opt.eps_dtheta, p.h, p.wbar, p.wunder,
               p.angular_active);
  if (opt.disable_angular) {
    p.angular_active.assign(p.n - 1, false);
  }
  p.g = joint_coeffs(p.ds, p.dtheta, lim.geometry);
  p.joint_active.assign(p.n - 1, !opt.disable_joint);
  check_boundary(p);
  return p;
}

}  // namespace ddtopp
