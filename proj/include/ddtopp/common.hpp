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

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ddtopp {

inline constexpr double kPi = std::numbers::pi;

// Segments shorter than this are treated as degenerate (duplicate points).
inline constexpr double kEpsSegment = 1e-9;

// Tangent norms below this cannot produce a reliable heading.
inline constexpr double kEpsTangent = 1e-9;

// Base class for all library errors. Mathematical outcomes (infeasible
// problems, iteration limits) are reported through status enums instead;
// exceptions are reserved for malformed inputs and broken preconditions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed argument: bad index, out-of-domain evaluation, invalid limits.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// Requested operating point cannot be realized within the stated limits.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Geometrically degenerate input: vanishing tangent, duplicate waypoints.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// File and format problems at the I/O boundary.
class IoError : public Error {
 public:
  using Error::Error;
};

// Maps an angle to the half-open interval (-pi, pi].
inline double wrap_angle(double a) {
  a -= 2.0 * kPi * std::ceil((a - kPi) / (2.0 * kPi));
  // Roundoff in the division can land exactly on -pi; fold it back.
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

}  // namespace ddtopp
