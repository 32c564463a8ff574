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

#include <Eigen/Core>
#include <cmath>
#include <cstddef>
#include <vector>

#include "ddtopp/common.hpp"

namespace ddtopp {

using Vec2d = Eigen::Vector2d;

// Ordered planar waypoints, consecutive points distinct.
using WaypointPath = std::vector<Vec2d>;

inline void validate_waypoints(const WaypointPath& w) {
  if (w.size() < 2) {
    throw InvalidArgumentError("waypoint path needs at least 2 points");
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!w[i].allFinite()) {
      throw InvalidArgumentError("waypoint coordinates must be finite");
    }
    if (i > 0 && (w[i] - w[i - 1]).norm() <= kEpsSegment) {
      throw DegenerateError("duplicate waypoint at index " + std::to_string(i));
    }
  }
}

// A geometric path sampled at fixed parameter resolution. Heading is wrapped
// to (-pi, pi]; curvature is unsigned.
struct PathSamples {
  std::vector<double> x;      // m
  std::vector<double> y;      // m
  std::vector<double> theta;  // rad
  std::vector<double> kappa;  // 1/m
  double resolution = 0.0;    // parameter step between samples

  std::size_t size() const { return x.size(); }

  void validate() const {
    const std::size_t n = size();
    if (n < 2 || y.size() != n || theta.size() != n || kappa.size() != n) {
      throw InvalidArgumentError("path samples: need n >= 2 consistent arrays");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(x[i]) || !std::isfinite(y[i]) ||
          !std::isfinite(theta[i]) || !std::isfinite(kappa[i]) ||
          kappa[i] < 0.0) {
        throw InvalidArgumentError("path samples: non-finite or negative "
                                   "curvature entry at index " +
                                   std::to_string(i));
      }
    }
  }
};

// Largest chord length divided by the sample resolution. For a path sampled
// in time this is the peak speed implied by the sampling.
inline double max_chord_speed(const PathSamples& s) {
  s.validate();
  if (!(s.resolution > 0.0)) {
    throw InvalidArgumentError("path samples: resolution must be positive");
  }
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double dx = s.x[i + 1] - s.x[i];
    const double dy = s.y[i + 1] - s.y[i];
    best = std::max(best, std::hypot(dx, dy));
  }
  return best / s.resolution;
}

}  // namespace ddtopp
