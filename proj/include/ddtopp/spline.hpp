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
// Clamped non-uniform B-splines: Cox-de Boor evaluation, derivatives,
// chord-length knot allocation, and global interpolation of waypoint paths.

#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "ddtopp/common.hpp"
#include "ddtopp/path.hpp"

namespace ddtopp {

template <typename T = double>
struct BSplineCurve {
  using Point = Eigen::Matrix<T, 2, 1>;

  int degree = 3;
  std::vector<T> knots;           // size control_points.size() + degree + 1
  std::vector<Point> control_points;

  T domain_start() const { return knots[degree]; }
  T domain_end() const { return knots[knots.size() - 1 - degree]; }
};

// Cox-de Boor basis N_{i,p}(u). Terms with empty knot spans contribute zero.
// The final non-empty span is treated as closed so that the basis still sums
// to one at the domain end.
template <typename T>
T basis(std::size_t i, int p, T u, const std::vector<T>& knots) {
  if (i + static_cast<std::size_t>(p) + 1 >= knots.size()) {
    throw InvalidArgumentError("basis: index out of range");
  }
  if (p == 0) {
    if (knots[i] <= u && u < knots[i + 1]) return T(1);
    // Closed right end of the last non-empty span.
    if (u == knots[i + 1] && knots[i] < knots[i + 1] &&
        knots[i + 1] == knots.back()) {
      return T(1);
    }
    return T(0);
  }
  T value = T(0);
  const T den_l = knots[i + p] - knots[i];
  if (den_l > T(0)) {
    value += (u - knots[i]) / den_l * basis(i, p - 1, u, knots);
  }
  const T den_r = knots[i + p + 1] - knots[i + 1];
  if (den_r > T(0)) {
    value += (knots[i + p + 1] - u) / den_r * basis(i + 1, p - 1, u, knots);
  }
  return value;
}

// Derivative of order `order` of N_{i,p} at u.
template <typename T>
T basis_derivative(std::size_t i, int p, T u, const std::vector<T>& knots,
                   int order) {
  if (order < 0) throw InvalidArgumentError("basis_derivative: bad order");
  if (order == 0) return basis(i, p, u, knots);
  if (order > p) return T(0);
  T value = T(0);
  const T den_l = knots[i + p] - knots[i];
  if (den_l > T(0)) {
    value += T(p) / den_l * basis_derivative(i, p - 1, u, knots, order - 1);
  }
  const T den_r = knots[i + p + 1] - knots[i + 1];
  if (den_r > T(0)) {
    value -= T(p) / den_r * basis_derivative(i + 1, p - 1, u, knots, order - 1);
  }
  return value;
}

namespace detail {

// Index of the knot span containing u, clamped to the curve domain.
template <typename T>
std::size_t find_span(const BSplineCurve<T>& c, T u) {
  const std::size_t p = static_cast<std::size_t>(c.degree);
  const std::size_t last = c.control_points.size() - 1;  // last valid span base
  if (u >= c.domain_end()) return last;
  if (u <= c.domain_start()) return p;
  const auto it = std::upper_bound(c.knots.begin(), c.knots.end(), u);
  const std::size_t span = static_cast<std::size_t>(it - c.knots.begin()) - 1;
  return std::clamp(span, p, last);
}

template <typename T>
void check_domain(const BSplineCurve<T>& c, T u) {
  // Tiny overshoot from parameter arithmetic is tolerated and clamped later.
  if (u < c.domain_start() - T(1e-9) || u > c.domain_end() + T(1e-9)) {
    throw InvalidArgumentError("spline evaluation outside the knot domain");
  }
}

}  // namespace detail

template <typename T>
typename BSplineCurve<T>::Point eval(const BSplineCurve<T>& c, T u) {
  detail::check_domain(c, u);
  u = std::clamp(u, c.domain_start(), c.domain_end());
  const std::size_t span = detail::find_span(c, u);
  typename BSplineCurve<T>::Point out = BSplineCurve<T>::Point::Zero();
  for (std::size_t i = span - c.degree; i <= span; ++i) {
    out += basis(i, c.degree, u, c.knots) * c.control_points[i];
  }
  return out;
}

// Derivative curve: one degree lower, scaled control differences.
template <typename T>
BSplineCurve<T> derivative_curve(const BSplineCurve<T>& c) {
  if (c.degree < 1) {
    throw InvalidArgumentError("derivative: curve degree must be >= 1");
  }
  BSplineCurve<T> d;
  d.degree = c.degree - 1;
  d.knots.assign(c.knots.begin() + 1, c.knots.end() - 1);
  d.control_points.resize(c.control_points.size() - 1);
  for (std::size_t i = 0; i + 1 < c.control_points.size(); ++i) {
    const T den = c.knots[i + c.degree + 1] - c.knots[i + 1];
    if (den > T(0)) {
      d.control_points[i] = (c.control_points[i + 1] - c.control_points[i]) *
                            (T(c.degree) / den);
    } else {
      d.control_points[i].setZero();
    }
  }
  return d;
}

template <typename T>
typename BSplineCurve<T>::Point eval_derivative(const BSplineCurve<T>& c, T u,
                                                int order) {
  if (order < 1 || order > c.degree) {
    throw InvalidArgumentError("derivative order must be in [1, degree]");
  }
  detail::check_domain(c, u);
  BSplineCurve<T> d = derivative_curve(c);
  for (int k = 1; k < order; ++k) d = derivative_curve(d);
  return eval(d, std::clamp(u, d.domain_start(), d.domain_end()));
}

// Tangent direction as a four-quadrant angle in (-pi, pi].
template <typename T>
T heading(const BSplineCurve<T>& c, T u) {
  const auto t = eval_derivative(c, u, 1);
  if (t.norm() < T(kEpsTangent)) {
    throw DegenerateError("heading: tangent norm below threshold");
  }
  return wrap_angle(std::atan2(t.y(), t.x()));
}

// Unsigned curvature |x'y'' - y'x''| / (x'^2 + y'^2)^(3/2).
template <typename T>
T curvature(const BSplineCurve<T>& c, T u) {
  if (c.degree < 2) {
    throw InvalidArgumentError("curvature needs degree >= 2");
  }
  const auto d1 = eval_derivative(c, u, 1);
  const auto d2 = eval_derivative(c, u, 2);
  const T speed2 = d1.squaredNorm();
  if (std::sqrt(speed2) < T(kEpsTangent)) {
    throw DegenerateError("curvature: tangent norm below threshold");
  }
  return std::abs(d1.x() * d2.y() - d1.y() * d2.x()) /
         (speed2 * std::sqrt(speed2));
}

// Parameter assigned to each waypoint: successive increments proportional to
// chord length, scaled so the first chord takes u0 parameter units.
inline std::vector<double> chord_parameters(const WaypointPath& w, double u0) {
  validate_waypoints(w);
  if (!(u0 > 0.0)) {
    throw InvalidArgumentError("chord parameters: u0 must be positive");
  }
  const double d0 = (w[1] - w[0]).norm();
  std::vector<double> s(w.size(), 0.0);
  for (std::size_t i = 1; i < w.size(); ++i) {
    s[i] = s[i - 1] + u0 * (w[i] - w[i - 1]).norm() / d0;
  }
  return s;
}

// Clamped knot vector over the chord parameters: p+1 coincident knots at each
// end, the interior waypoint parameters in between.
inline std::vector<double> chord_length_knots(const WaypointPath& w, int p,
                                              double u0) {
  if (p < 1) throw InvalidArgumentError("knots: degree must be >= 1");
  const std::vector<double> s = chord_parameters(w, u0);
  std::vector<double> knots;
  knots.reserve(w.size() + 2 * static_cast<std::size_t>(p));
  knots.insert(knots.end(), p + 1, s.front());
  knots.insert(knots.end(), s.begin() + 1, s.end() - 1);
  knots.insert(knots.end(), p + 1, s.back());
  return knots;
}

// Global interpolation: every waypoint is reproduced at its chord parameter.
// The system is squared up with p-1 natural end conditions, alternating
// derivative order and end: order 2 at the start, order 2 at the end, order 3
// at the start, and so on.
inline BSplineCurve<double> fit(const WaypointPath& w, int p,
                                double u0 = 0.0) {
  validate_waypoints(w);
  const std::size_t l = w.size();
  if (p < 1 || l < static_cast<std::size_t>(p) + 1) {
    throw InvalidArgumentError("fit: need at least degree + 1 waypoints");
  }
  if (u0 == 0.0) u0 = (w[1] - w[0]).norm();

  BSplineCurve<double> c;
  c.degree = p;
  c.knots = chord_length_knots(w, p, u0);
  const std::vector<double> s = chord_parameters(w, u0);
  const std::size_t nc = l + static_cast<std::size_t>(p) - 1;
  c.control_points.assign(nc, Vec2d::Zero());

  // Row order keeps the matrix near its diagonal: first waypoint, start-side
  // end conditions, interior waypoints, end-side conditions, last waypoint.
  struct Row {
    double u;
    int deriv_order;  // 0 = interpolation
    Vec2d rhs;
  };
  std::vector<Row> rows;
  rows.reserve(nc);
  std::vector<std::pair<int, bool>> conditions;  // (order, at_start)
  for (int order = 2, side = 0; conditions.size() + 1 < static_cast<std::size_t>(p);
       ++side) {
    conditions.emplace_back(order, side % 2 == 0);
    if (side % 2 == 1) ++order;
  }
  rows.push_back({s.front(), 0, w.front()});
  for (const auto& [order, at_start] : conditions) {
    if (at_start) rows.push_back({s.front(), order, Vec2d::Zero()});
  }
  for (std::size_t j = 1; j + 1 < l; ++j) rows.push_back({s[j], 0, w[j]});
  for (auto it = conditions.rbegin(); it != conditions.rend(); ++it) {
    if (!it->second) rows.push_back({s.back(), it->first, Vec2d::Zero()});
  }
  rows.push_back({s.back(), 0, w.back()});

  Eigen::SparseMatrix<double> A(nc, nc);
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::MatrixX2d b(nc, 2);
  BSplineCurve<double> probe = c;  // knots and degree only, for span lookup
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t span = detail::find_span(probe, rows[r].u);
    for (std::size_t i = span - p; i <= span; ++i) {
      const double coeff =
          rows[r].deriv_order == 0
              ? basis(i, p, rows[r].u, c.knots)
              : basis_derivative(i, p, rows[r].u, c.knots, rows[r].deriv_order);
      if (coeff != 0.0) {
        triplets.emplace_back(static_cast<int>(r), static_cast<int>(i), coeff);
      }
    }
    b(r, 0) = rows[r].rhs.x();
    b(r, 1) = rows[r].rhs.y();
  }
  A.setFromTriplets(triplets.begin(), triplets.end());

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) {
    throw DegenerateError("fit: singular interpolation system");
  }
  const Eigen::MatrixX2d q = lu.solve(b);
  if (lu.info() != Eigen::Success) {
    throw DegenerateError("fit: interpolation solve failed");
  }
  for (std::size_t i = 0; i < nc; ++i) {
    c.control_points[i] = q.row(i).transpose();
  }
  return c;
}

// Samples the curve at fixed parameter resolution. The last sample lands
// exactly on the domain end. Curvature needs degree >= 2 and is reported as
// zero for linear curves.
template <typename T>
PathSamples sample_path(const BSplineCurve<T>& c, double du) {
  const double lo = c.domain_start();
  const double hi = c.domain_end();
  if (!(du > 0.0) || !(hi > lo)) {
    throw InvalidArgumentError("sampling: need positive resolution and a "
                               "non-empty domain");
  }
  const std::size_t count =
      static_cast<std::size_t>(std::floor((hi - lo) / du + 1e-9));
  if (count < 1) {
    throw InvalidArgumentError("sampling: resolution exceeds the domain");
  }
  PathSamples out;
  out.resolution = du;
  out.x.reserve(count + 1);
  for (std::size_t i = 0; i <= count; ++i) {
    const T u = (i == count) ? T(hi) : T(lo + static_cast<double>(i) * du);
    const auto point = eval(c, u);
    out.x.push_back(point.x());
    out.y.push_back(point.y());
    out.theta.push_back(heading(c, u));
    out.kappa.push_back(c.degree >= 2 ? curvature(c, u) : T(0));
  }
  return out;
}

}  // namespace ddtopp
