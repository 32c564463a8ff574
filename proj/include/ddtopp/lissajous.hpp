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
// Closed figure-eight benchmark path with analytic heading and curvature.
// The curve is
//
//   x(t) = ax (cos(phase) - cos(wx t + phase))
//   y(t) = ay (1 - cos(wy t))
//
// which starts at the origin and, with the default frequency ratio, closes
// after one period while crossing itself twice.

#pragma once

#include <cmath>
#include <cstddef>

#include "ddtopp/common.hpp"
#include "ddtopp/path.hpp"

namespace ddtopp {

struct LissajousParams {
  double ax = 10.0;             // m
  double ay = 2.0;              // m
  double wx = 0.06 * kPi;       // rad/s
  double wy = 0.04 * kPi;       // rad/s
  double phase = 0.25 * kPi;    // rad
  double t1 = 100.0;            // s, sampling horizon
  double dt = 0.01;             // s, sampling step
};

// Samples the curve on [0, t1] with step dt; the final sample lands exactly
// on t1. Heading and curvature come from the analytic derivatives.
inline PathSamples sample_lissajous(const LissajousParams& params) {
  if (!(params.dt > 0.0) || !(params.t1 > 0.0)) {
    throw InvalidArgumentError("lissajous: t1 and dt must be positive");
  }
  const std::size_t count =
      static_cast<std::size_t>(std::floor(params.t1 / params.dt + 1e-9));
  if (count < 1) {
    throw InvalidArgumentError("lissajous: dt larger than the horizon");
  }
  PathSamples out;
  out.resolution = params.dt;
  out.x.reserve(count + 1);
  out.y.reserve(count + 1);
  out.theta.reserve(count + 1);
  out.kappa.reserve(count + 1);
  for (std::size_t i = 0; i <= count; ++i) {
    const double t = i == count ? params.t1
                                : params.dt * static_cast<double>(i);
    const double px = params.wx * t + params.phase;
    const double py = params.wy * t;
    out.x.push_back(params.ax * (std::cos(params.phase) - std::cos(px)));
    out.y.push_back(params.ay * (1.0 - std::cos(py)));
    const double dx = params.ax * params.wx * std::sin(px);
    const double dy = params.ay * params.wy * std::sin(py);
    const double ddx = params.ax * params.wx * params.wx * std::cos(px);
    const double ddy = params.ay * params.wy * params.wy * std::cos(py);
    const double speed_sq = dx * dx + dy * dy;
    if (speed_sq < kEpsTangent * kEpsTangent) {
      throw DegenerateError("lissajous: vanishing tangent in the sampling");
    }
    out.theta.push_back(wrap_angle(std::atan2(dy, dx)));
    out.kappa.push_back(std::abs(dx * ddy - dy * ddx) /
                        (speed_sq * std::sqrt(speed_sq)));
  }
  return out;
}

}  // namespace ddtopp
