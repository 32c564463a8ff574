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
// Exhaustive dynamic-programming reference for the speed planner. Each node
// speed is restricted to a uniform grid and the cheapest constraint-
// satisfying profile is found by forward recursion. Deliberately written
// against the original constraint definitions rather than the solver's
// internal form, so the two implementations check each other.

#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "ddtopp/common.hpp"
#include "ddtopp/discretize.hpp"

namespace ddtopp {

struct DpOracleOptions {
  int levels = 400;  // grid intervals per node; speed j is j/levels * vcap
  // state-space guard: refuse instances with more than this many edges
  double max_edges = 1e8;
};

struct DpOracleResult {
  bool feasible = false;
  double t_f = std::numeric_limits<double>::infinity();
  std::vector<double> v;  // m/s, one entry per node when feasible
};

// Plans on the speed grid and returns the cheapest feasible profile. A
// feasible grid profile is feasible for the continuous program as well, so
// the returned time is an upper bound on the true optimum.
inline DpOracleResult dp_reference(const DiscretizedProblem& p,
                                   const DpOracleOptions& opt = {}) {
  DpOracleResult result;
  if (opt.levels < 1) {
    throw InvalidArgumentError("dp_reference: levels must be positive");
  }
  const std::size_t n = p.n;
  const std::size_t m_levels = static_cast<std::size_t>(opt.levels);
  const double edges = static_cast<double>(n) *
                       static_cast<double>(m_levels + 1) *
                       static_cast<double>(m_levels + 1);
  if (edges > opt.max_edges) {
    throw InvalidArgumentError(
        "dp_reference: grid too large, reduce levels or the node count");
  }
  try {
    check_boundary(p);
  } catch (const InfeasibleError&) {
    return result;
  }

  // Per-node speed levels. Boundary nodes carry only the snapped boundary
  // speed; pinned nodes keep levels within one grid step of the pin.
  const auto level_value = [&](std::size_t k, std::size_t j) {
    return p.vcap[k] * static_cast<double>(j) /
           static_cast<double>(m_levels);
  };
  const auto snap = [&](std::size_t k, double value) -> std::size_t {
    if (p.vcap[k] <= 0.0) return 0;
    const double raw =
        std::round(value / p.vcap[k] * static_cast<double>(m_levels));
    const double clamped =
        std::min(std::max(raw, 0.0), static_cast<double>(m_levels));
    return static_cast<std::size_t>(clamped);
  };
  const BoundaryPins pins = boundary_pins(p);
  std::vector<std::vector<std::size_t>> allowed(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0) {
      allowed[k] = {snap(0, p.boundary.v_s)};
      continue;
    }
    if (k == n - 1) {
      allowed[k] = {snap(n - 1, p.boundary.v_f)};
      continue;
    }
    double pin = -1.0;
    if (k == 1 && pins.pin_second) pin = pins.second_value;
    if (k == n - 2 && pins.pin_second_last) pin = pins.second_last_value;
    const double step = p.vcap[k] / static_cast<double>(m_levels);
    for (std::size_t j = 0; j <= m_levels; ++j) {
      if (pin >= 0.0 && std::abs(level_value(k, j) - pin) > step + 1e-12) {
        continue;
      }
      allowed[k].push_back(j);
    }
    if (allowed[k].empty()) return result;
  }

  // True transition test between consecutive node speeds.
  const auto edge_ok = [&](std::size_t k, double u, double w) -> bool {
    const double sigma = u + w;
    if (!(sigma > 0.0)) return false;
    const double two_ds = 2.0 * p.ds[k];
    if (w * w - u * u > two_ds * p.limits.a_max) return false;
    if (u * u - w * w > -two_ds * p.limits.a_min) return false;
    if (p.angular_active[k]) {
      if (sigma < p.wunder[k] || sigma > p.wbar[k]) return false;
    }
    if (p.joint_active[k]) {
      const double gk = p.g[k];
      const JointLimits& jl = p.limits.joint;
      const double vr = (1.0 + gk) * u + gk * w;
      const double vl = (1.0 - gk) * u - gk * w;
      if (vr < jl.v_r_min || vr > jl.v_r_max) return false;
      if (vl < jl.v_l_min || vl > jl.v_l_max) return false;
      if (p.strict_joint) {
        const double vr_end = gk * u + (1.0 + gk) * w;
        const double vl_end = -gk * u + (1.0 - gk) * w;
        if (vr_end < jl.v_r_min || vr_end > jl.v_r_max) return false;
        if (vl_end < jl.v_l_min || vl_end > jl.v_l_max) return false;
      }
    }
    return true;
  };

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cost_prev(m_levels + 1, inf);
  std::vector<double> cost_cur(m_levels + 1, inf);
  std::vector<std::vector<std::size_t>> back(
      n, std::vector<std::size_t>(m_levels + 1, m_levels + 1));
  for (const std::size_t j : allowed[0]) cost_prev[j] = 0.0;

  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::fill(cost_cur.begin(), cost_cur.end(), inf);
    for (const std::size_t j : allowed[k]) {
      if (cost_prev[j] == inf) continue;
      const double u = level_value(k, j);
      for (const std::size_t j2 : allowed[k + 1]) {
        const double w = level_value(k + 1, j2);
        if (!edge_ok(k, u, w)) continue;
        const double cand = cost_prev[j] + 2.0 * p.ds[k] / (u + w);
        if (cand < cost_cur[j2]) {
          cost_cur[j2] = cand;
          back[k + 1][j2] = j;
        }
      }
    }
    cost_prev.swap(cost_cur);
  }

  const std::size_t j_final = allowed[n - 1].front();
  if (cost_prev[j_final] == inf) return result;

  result.feasible = true;
  result.t_f = cost_prev[j_final];
  result.v.assign(n, 0.0);
  std::size_t j = j_final;
  for (std::size_t k = n; k-- > 0;) {
    result.v[k] = level_value(k, j);
    if (k > 0) j = back[k][j];
  }
  return result;
}

}  // namespace ddtopp
