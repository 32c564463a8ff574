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
// Primal-dual interior-point solver for the discrete speed-planning program.
// The program couples each node speed only to its neighbors, so with the
// variables ordered v_0, c_0, v_1, c_1, ... the Newton systems are banded
// with half-bandwidth 2 and factor in linear time. Boundary equalities are
// eliminated by substitution before the iteration starts. The solve is
// single-threaded and deterministic.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ddtopp/common.hpp"
#include "ddtopp/discretize.hpp"

namespace ddtopp {

enum class SolveStatus { kOptimal, kInfeasible, kMaxIterations };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kMaxIterations: return "max-iterations";
  }
  return "unknown";
}

struct SolverSettings {
  double tol_feas = 1e-8;
  double tol_gap = 1e-8;
  int max_iter = 200;
  std::string backend = "ipm";
};

struct Solution {
  SolveStatus status = SolveStatus::kMaxIterations;
  std::vector<double> v;          // m/s, size n
  std::vector<double> c;          // s/m, size n-1
  double objective_value = 0.0;   // s
  int iterations = 0;
  double solve_time = 0.0;        // s
  std::string message;
};

namespace detail {

constexpr const char* kFamilyNames[] = {"velocity-cap", "acceleration",
                                        "angular", "joint", "cone",
                                        "boundary"};

// One scalar inequality f(x) <= 0 over at most three variables. Affine rows
// cover boxes, acceleration, turn-rate bands and wheel boxes; the cone rows
// are f = 1/sigma - c with sigma the segment speed sum.
struct Ineq {
  enum class Kind : std::uint8_t { kAffine, kCone };
  Kind kind = Kind::kAffine;
  std::uint8_t family = 0;  // index into kFamilyNames
  int nv = 0;               // active variable slots (cone: sigma terms)
  int var[3] = {-1, -1, -1};
  double coef[3] = {0, 0, 0};
  double cst = 0.0;  // affine constant; cone: fixed part of sigma
  int cvar = -1;     // cone only: slack variable index
};

// Interval-propagation screen over the hard (slack-free) constraints. Finds
// certain infeasibilities cheaply and names the family responsible; passing
// the screen is necessary, not sufficient.
inline std::optional<std::string> interval_screen(
    const DiscretizedProblem& p, const std::vector<char>& fixed,
    const std::vector<double>& fixed_value) {
  const std::size_t n = p.n;
  std::vector<double> lo(n, 0.0), hi(n);
  for (std::size_t k = 0; k < n; ++k) {
    hi[k] = p.vcap[k];
    if (fixed[k]) lo[k] = hi[k] = fixed_value[k];
  }
  std::string family;

  // Tightens w from a*u + b*w in [low, up] with u in [ulo, uhi].
  const auto tighten = [&](double a, double ulo, double uhi, double b,
                           double low, double up, double& wlo, double& whi) {
    if (std::abs(b) < 1e-15) return;
    const double au_min = std::min(a * ulo, a * uhi);
    const double au_max = std::max(a * ulo, a * uhi);
    double cand_lo = (low - au_max) / b;
    double cand_hi = (up - au_min) / b;
    if (b < 0.0) std::swap(cand_lo, cand_hi);
    wlo = std::max(wlo, cand_lo);
    whi = std::min(whi, cand_hi);
  };

  const auto pass_segment = [&](std::size_t k) -> bool {
    // forward: tighten node k+1 from node k, then the reverse
    for (int dir = 0; dir < 2; ++dir) {
      const std::size_t self = dir == 0 ? k + 1 : k;
      const std::size_t other = dir == 0 ? k : k + 1;
      double& slo = lo[self];
      double& shi = hi[self];
      if (p.angular_active[k]) {
        tighten(1.0, lo[other], hi[other], 1.0, p.wunder[k], p.wbar[k], slo,
                shi);
        if (slo > shi + 1e-12) { family = "angular"; return false; }
      }
      if (p.joint_active[k]) {
        const double gk = p.g[k];
        const JointLimits& jl = p.limits.joint;
        // right wheel at segment start: (1+g) v_k + g v_{k+1}
        // left wheel at segment start: (1-g) v_k - g v_{k+1}
        const double a_r = self == k + 1 ? 1.0 + gk : gk;
        const double b_r = self == k + 1 ? gk : 1.0 + gk;
        tighten(a_r, lo[other], hi[other], b_r, jl.v_r_min, jl.v_r_max, slo,
                shi);
        const double a_l = self == k + 1 ? 1.0 - gk : -gk;
        const double b_l = self == k + 1 ? -gk : 1.0 - gk;
        tighten(a_l, lo[other], hi[other], b_l, jl.v_l_min, jl.v_l_max, slo,
                shi);
        if (p.strict_joint) {
          // wheel speeds at the segment end node
          const double ar2 = self == k + 1 ? gk : 1.0 + gk;
          const double br2 = self == k + 1 ? 1.0 + gk : gk;
          tighten(ar2, lo[other], hi[other], br2, jl.v_r_min, jl.v_r_max, slo,
                  shi);
          const double al2 = self == k + 1 ? -gk : 1.0 - gk;
          const double bl2 = self == k + 1 ? 1.0 - gk : -gk;
          tighten(al2, lo[other], hi[other], bl2, jl.v_l_min, jl.v_l_max, slo,
                  shi);
        }
        if (slo > shi + 1e-12) { family = "joint"; return false; }
      }
    }
    if (hi[k] + hi[k + 1] <= 0.0) { family = "cone"; return false; }
    return true;
  };

  for (int sweep = 0; sweep < 2; ++sweep) {
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (!pass_segment(k)) {
        return "infeasible: " + family + " constraints admit no speed at "
               "segment " + std::to_string(k);
      }
    }
    for (std::size_t k = n - 1; k-- > 0;) {
      if (!pass_segment(k)) {
        return "infeasible: " + family + " constraints admit no speed at "
               "segment " + std::to_string(k);
      }
    }
  }
  return std::nullopt;
}

// Symmetric positive-definite band matrix, lower storage: band(d, j) holds
// entry (j + d, j).
class BandMatrix {
 public:
  BandMatrix(std::size_t dim, std::size_t half_bandwidth)
      : dim_(dim), hb_(half_bandwidth), a_((hb_ + 1) * dim_, 0.0) {}

  void clear() { std::fill(a_.begin(), a_.end(), 0.0); }

  double& at(std::size_t row, std::size_t col) {
    // lower triangle only: row >= col, row - col <= hb_
    return a_[(row - col) * dim_ + col];
  }

  void add_symmetric(std::size_t i, std::size_t j, double value) {
    if (i >= j) {
      a_[(i - j) * dim_ + j] += value;
    } else {
      a_[(j - i) * dim_ + i] += value;
    }
  }

  // In-place Cholesky; returns false if a pivot collapses.
  bool factor() {
    for (std::size_t j = 0; j < dim_; ++j) {
      const std::size_t k0 = j > hb_ ? j - hb_ : 0;
      double d = a_[j];
      for (std::size_t k = k0; k < j; ++k) {
        const double l = a_[(j - k) * dim_ + k];
        d -= l * l;
      }
      if (!(d > 0.0)) return false;
      d = std::sqrt(d);
      a_[j] = d;
      const std::size_t last = std::min(dim_ - 1, j + hb_);
      for (std::size_t i = j + 1; i <= last; ++i) {
        const std::size_t ki = i > hb_ ? i - hb_ : 0;
        double s = a_[(i - j) * dim_ + j];
        for (std::size_t k = std::max(k0, ki); k < j; ++k) {
          s -= a_[(i - k) * dim_ + k] * a_[(j - k) * dim_ + k];
        }
        a_[(i - j) * dim_ + j] = s / d;
      }
    }
    return true;
  }

  // Solves L L^T x = b with the factored matrix.
  void solve(std::vector<double>& b) const {
    for (std::size_t i = 0; i < dim_; ++i) {
      const std::size_t k0 = i > hb_ ? i - hb_ : 0;
      double s = b[i];
      for (std::size_t k = k0; k < i; ++k) {
        s -= a_[(i - k) * dim_ + k] * b[k];
      }
      b[i] = s / a_[i];
    }
    for (std::size_t i = dim_; i-- > 0;) {
      const std::size_t last = std::min(dim_ - 1, i + hb_);
      double s = b[i];
      for (std::size_t k = i + 1; k <= last; ++k) {
        s -= a_[(k - i) * dim_ + i] * b[k];
      }
      b[i] = s / a_[i];
    }
  }

 private:
  std::size_t dim_;
  std::size_t hb_;
  std::vector<double> a_;
};

}  // namespace detail

// Solves the assembled program. Infeasibility is reported as a status with
// the offending constraint family named in `message`; exceptions are
// reserved for malformed problem data.
inline Solution solve(const DiscretizedProblem& p,
                      const SolverSettings& settings = {}) {
  using Clock = std::chrono::steady_clock;
  const auto t_start = Clock::now();
  auto finish = [&](Solution sol) {
    sol.solve_time =
        std::chrono::duration<double>(Clock::now() - t_start).count();
    return sol;
  };

  const std::size_t n = p.n;
  const std::size_t nseg = n > 0 ? n - 1 : 0;
  if (n < 2 || p.ds.size() != nseg || p.dtheta.size() != nseg ||
      p.abar.size() != nseg || p.aunder.size() != nseg ||
      p.h.size() != nseg || p.wbar.size() != nseg ||
      p.wunder.size() != nseg || p.g.size() != nseg ||
      p.angular_active.size() != nseg || p.joint_active.size() != nseg ||
      p.vcap.size() != n) {
    throw InvalidArgumentError("solve: inconsistent problem arrays");
  }

  Solution sol;
  sol.v.assign(n, 0.0);
  sol.c.assign(nseg, 0.0);

  // Boundary screening; violations surface as an infeasible status.
  try {
    check_boundary(p);
  } catch (const InfeasibleError& e) {
    sol.status = SolveStatus::kInfeasible;
    sol.message = e.what();
    return finish(sol);
  }

  // Variable elimination: endpoints and turn-rate pins are substituted.
  std::vector<char> fixed(n, 0);
  std::vector<double> fixed_value(n, 0.0);
  fixed[0] = 1;
  fixed_value[0] = p.boundary.v_s;
  fixed[n - 1] = 1;
  fixed_value[n - 1] = p.boundary.v_f;
  const BoundaryPins pins = boundary_pins(p);
  if (pins.pin_second) {
    fixed[1] = 1;
    fixed_value[1] = std::max(0.0, pins.second_value);
  }
  if (pins.pin_second_last) {
    fixed[n - 2] = 1;
    fixed_value[n - 2] = std::max(0.0, pins.second_last_value);
  }

  if (auto msg = detail::interval_screen(p, fixed, fixed_value)) {
    sol.status = SolveStatus::kInfeasible;
    sol.message = *msg;
    return finish(sol);
  }

  // Variable layout: v_0?, c_0, v_1?, c_1, ..., c_{n-2}, v_{n-1}? with fixed
  // nodes omitted. Keeps every constraint within band distance 2.
  std::vector<int> vindex(n, -1);
  std::vector<int> cindex(nseg, -1);
  int nx = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!fixed[k]) vindex[k] = nx++;
    if (k < nseg) cindex[k] = nx++;
  }
  const std::size_t N = static_cast<std::size_t>(nx);

  // Objective: q^T x, entries 2 ds_k on the slacks.
  std::vector<double> q(N, 0.0);
  for (std::size_t k = 0; k < nseg; ++k) q[cindex[k]] = 2.0 * p.ds[k];

  // Build the inequality list.
  std::vector<detail::Ineq> cons;
  cons.reserve(10 * nseg + 2 * n);
  auto add_affine = [&](std::uint8_t family,
                        std::initializer_list<std::pair<int, double>> terms,
                        double cst) -> bool {
    detail::Ineq q_row;
    q_row.kind = detail::Ineq::Kind::kAffine;
    q_row.family = family;
    q_row.cst = cst;
    for (const auto& [node_or_var, coef] : terms) {
      if (node_or_var < 0 || coef == 0.0) continue;
      q_row.var[q_row.nv] = node_or_var;
      q_row.coef[q_row.nv] = coef;
      ++q_row.nv;
    }
    if (q_row.nv == 0) {
      // Fully fixed: consistent rows vanish, contradictions are infeasible.
      return q_row.cst <= 1e-9;
    }
    cons.push_back(q_row);
    return true;
  };
  // Helper mapping node k to either its variable index with the given
  // coefficient, or folding a fixed value into the constant.
  auto term = [&](std::size_t k, double coef,
                  double& cst) -> std::pair<int, double> {
    if (fixed[k]) {
      cst += coef * fixed_value[k];
      return {-1, 0.0};
    }
    return {vindex[k], coef};
  };

  const std::uint8_t kFamBox = 0, kFamAccel = 1, kFamAngular = 2,
                     kFamJoint = 3, kFamCone = 4;
  bool consistent = true;
  std::string bad_family;
  auto require = [&](bool ok, const char* family, std::size_t where) {
    if (!ok && consistent) {
      consistent = false;
      bad_family = std::string("infeasible: ") + family +
                   " constraint is violated by the boundary values at index " +
                   std::to_string(where);
    }
  };

  for (std::size_t k = 0; k < n; ++k) {
    if (fixed[k]) continue;
    add_affine(kFamBox, {{vindex[k], -1.0}}, 0.0);                 // v >= 0
    add_affine(kFamBox, {{vindex[k], 1.0}}, -p.vcap[k]);           // v <= cap
  }
  for (std::size_t k = 0; k < nseg; ++k) {
    const int ck = cindex[k];
    {
      double cst = 0.0;
      auto t0 = term(k, -1.0, cst);
      auto t1 = term(k + 1, 1.0, cst);
      require(add_affine(kFamAccel, {t0, t1, {ck, -p.abar[k]}}, cst),
              "acceleration", k);
    }
    {
      double cst = 0.0;
      auto t0 = term(k, 1.0, cst);
      auto t1 = term(k + 1, -1.0, cst);
      require(add_affine(kFamAccel, {t0, t1, {ck, p.aunder[k]}}, cst),
              "acceleration", k);
    }
    if (p.angular_active[k]) {
      double cst_u = -p.wbar[k];
      auto a0 = term(k, 1.0, cst_u);
      auto a1 = term(k + 1, 1.0, cst_u);
      require(add_affine(kFamAngular, {a0, a1}, cst_u), "angular", k);
      double cst_l = p.wunder[k];
      auto b0 = term(k, -1.0, cst_l);
      auto b1 = term(k + 1, -1.0, cst_l);
      require(add_affine(kFamAngular, {b0, b1}, cst_l), "angular", k);
    }
    if (p.joint_active[k]) {
      const double gk = p.g[k];
      const JointLimits& jl = p.limits.joint;
      const auto wheel_box = [&](double ca, double cb, double lo, double hi) {
        double cst_u = -hi;
        auto u0 = term(k, ca, cst_u);
        auto u1 = term(k + 1, cb, cst_u);
        require(add_affine(kFamJoint, {u0, u1}, cst_u), "joint", k);
        double cst_l = lo;
        auto l0 = term(k, -ca, cst_l);
        auto l1 = term(k + 1, -cb, cst_l);
        require(add_affine(kFamJoint, {l0, l1}, cst_l), "joint", k);
      };
      wheel_box(1.0 + gk, gk, jl.v_r_min, jl.v_r_max);      // right, start
      wheel_box(1.0 - gk, -gk, jl.v_l_min, jl.v_l_max);     // left, start
      if (p.strict_joint) {
        wheel_box(gk, 1.0 + gk, jl.v_r_min, jl.v_r_max);    // right, end
        wheel_box(-gk, 1.0 - gk, jl.v_l_min, jl.v_l_max);   // left, end
      }
    }
    {
      detail::Ineq cone;
      cone.kind = detail::Ineq::Kind::kCone;
      cone.family = kFamCone;
      cone.cvar = ck;
      if (!fixed[k]) { cone.var[cone.nv] = vindex[k]; ++cone.nv; }
      else cone.cst += fixed_value[k];
      if (!fixed[k + 1]) { cone.var[cone.nv] = vindex[k + 1]; ++cone.nv; }
      else cone.cst += fixed_value[k + 1];
      cons.push_back(cone);
      // slack must stay positive for the cone to be satisfiable
      add_affine(kFamCone, {{ck, -1.0}}, 0.0);
    }
  }
  if (!consistent) {
    sol.status = SolveStatus::kInfeasible;
    sol.message = bad_family;
    return finish(sol);
  }
  const std::size_t m = cons.size();

  // Strictly feasible start: shrink the node speeds until every affine row
  // holds strictly, then give each slack twice the margin it needs.
  std::vector<double> x(N, 0.0);
  {
    double cap_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) cap_min = std::min(cap_min, p.vcap[k]);
    double tau = 0.49;
    bool ok = false;
    for (int attempt = 0; attempt < 120 && !ok; ++attempt) {
      for (std::size_t k = 0; k < n; ++k) {
        if (!fixed[k]) x[vindex[k]] = tau * cap_min;
      }
      ok = true;
      for (const auto& row : cons) {
        if (row.kind != detail::Ineq::Kind::kAffine) continue;
        // Rows involving the time slacks hold strictly once the slacks are
        // set below; only the speed-space rows gate the shrink.
        if (row.family == kFamCone || row.family == kFamAccel) continue;
        double f = row.cst;
        for (int j = 0; j < row.nv; ++j) f += row.coef[j] * x[row.var[j]];
        if (!(f < -1e-14)) { ok = false; break; }
      }
      if (!ok) tau *= 0.5;
    }
    if (!ok) {
      sol.status = SolveStatus::kMaxIterations;
      sol.message = "no strictly interior start found; the feasible set may "
                    "have empty interior";
      return finish(sol);
    }
    for (std::size_t k = 0; k < nseg; ++k) {
      const double vk = fixed[k] ? fixed_value[k] : x[vindex[k]];
      const double vk1 = fixed[k + 1] ? fixed_value[k + 1] : x[vindex[k + 1]];
      const double sigma = vk + vk1;
      // Twice the cone requirement plus whatever the acceleration rows need
      // keeps every slack-involving row strictly satisfied.
      double need = std::max(0.0, 2.0 * (vk1 - vk) / p.abar[k]);
      need = std::max(need, 2.0 * (vk - vk1) / (-p.aunder[k]));
      x[cindex[k]] = 2.0 / sigma + need;
    }
  }

  // Interior-point state. The slacks are independent variables tied to the
  // constraints only through the residual f(x) + s = 0, which the iteration
  // drives to zero; that keeps full Newton steps available even when an
  // active cone row curves away from its tangent.
  std::vector<double> s(m), lambda(m), f(m);
  const auto eval_all = [&](const std::vector<double>& xx,
                            std::vector<double>& ff) -> bool {
    for (std::size_t i = 0; i < m; ++i) {
      const auto& row = cons[i];
      if (row.kind == detail::Ineq::Kind::kAffine) {
        double val = row.cst;
        for (int j = 0; j < row.nv; ++j) val += row.coef[j] * xx[row.var[j]];
        ff[i] = val;
      } else {
        double sigma = row.cst;
        for (int j = 0; j < row.nv; ++j) sigma += xx[row.var[j]];
        if (!(sigma > 0.0)) return false;
        ff[i] = 1.0 / sigma - xx[row.cvar];
      }
      if (!(ff[i] < 0.0)) return false;
    }
    return true;
  };
  if (!eval_all(x, f)) {
    sol.status = SolveStatus::kMaxIterations;
    sol.message = "interior start rejected";
    return finish(sol);
  }
  for (std::size_t i = 0; i < m; ++i) {
    s[i] = -f[i];
    lambda[i] = 1.0 / s[i];
  }

  const std::size_t kHalfBand = 2;
  detail::BandMatrix H(N, kHalfBand);
  std::vector<double> dx(N), grad_dot_dx(m), weights(m), r_prim(m), r_cent(m);
  std::vector<double> dlam(m), ds(m), dlam_aff(m), ds_aff(m);

  // Gradient slots per row: cone rows have nv sigma entries of -1/sigma^2
  // followed by the slack entry of -1.
  const auto row_grad = [&](const detail::Ineq& row, double sigma,
                            int slot) -> std::pair<int, double> {
    if (row.kind == detail::Ineq::Kind::kAffine) {
      return {row.var[slot], row.coef[slot]};
    }
    if (slot < row.nv) return {row.var[slot], -1.0 / (sigma * sigma)};
    return {row.cvar, -1.0};
  };
  const auto row_slots = [&](const detail::Ineq& row) {
    return row.kind == detail::Ineq::Kind::kAffine ? row.nv : row.nv + 1;
  };
  const auto row_sigma = [&](const detail::Ineq& row) -> double {
    if (row.kind == detail::Ineq::Kind::kAffine) return 0.0;
    double sigma = row.cst;
    for (int j = 0; j < row.nv; ++j) sigma += x[row.var[j]];
    return sigma;
  };

  // Solves H dx = -q - sum_i w_i grad f_i for the given row weights.
  const auto solve_direction = [&](const std::vector<double>& row_w,
                                   std::vector<double>& out) {
    for (std::size_t j = 0; j < N; ++j) out[j] = -q[j];
    for (std::size_t i = 0; i < m; ++i) {
      const auto& row = cons[i];
      const double sigma = row_sigma(row);
      const int slots = row_slots(row);
      for (int j = 0; j < slots; ++j) {
        const auto [vi, gv] = row_grad(row, sigma, j);
        out[vi] -= row_w[i] * gv;
      }
    }
    H.solve(out);
  };
  const auto grad_dots = [&](const std::vector<double>& step,
                             std::vector<double>& dots) {
    for (std::size_t i = 0; i < m; ++i) {
      const auto& row = cons[i];
      const double sigma = row_sigma(row);
      const int slots = row_slots(row);
      double dot = 0.0;
      for (int j = 0; j < slots; ++j) {
        const auto [vi, gv] = row_grad(row, sigma, j);
        dot += gv * step[vi];
      }
      dots[i] = dot;
    }
  };

  for (int iter = 0; iter < settings.max_iter; ++iter) {
    // Residuals at the current point.
    bool domain_ok = true;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& row = cons[i];
      if (row.kind == detail::Ineq::Kind::kAffine) {
        double val = row.cst;
        for (int j = 0; j < row.nv; ++j) val += row.coef[j] * x[row.var[j]];
        f[i] = val;
      } else {
        const double sigma = row_sigma(row);
        if (!(sigma > 0.0)) { domain_ok = false; break; }
        f[i] = 1.0 / sigma - x[row.cvar];
      }
      r_prim[i] = f[i] + s[i];
    }
    if (!domain_ok) {
      sol.status = SolveStatus::kMaxIterations;
      sol.iterations = iter;
      sol.message = "iterate left the cone domain";
      break;
    }
    double gap = 0.0, rprim_inf = 0.0, s_inf = 0.0, lambda_inf = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      gap += lambda[i] * s[i];
      rprim_inf = std::max(rprim_inf, std::abs(r_prim[i]));
      s_inf = std::max(s_inf, s[i]);
      lambda_inf = std::max(lambda_inf, lambda[i]);
    }
    const double mu = gap / static_cast<double>(m);
    double rdual_inf = 0.0;
    {
      std::vector<double> r(q);
      for (std::size_t i = 0; i < m; ++i) {
        const auto& row = cons[i];
        const double sigma = row_sigma(row);
        const int slots = row_slots(row);
        for (int j = 0; j < slots; ++j) {
          const auto [vi, gv] = row_grad(row, sigma, j);
          r[vi] += lambda[i] * gv;
        }
      }
      for (std::size_t j = 0; j < N; ++j) {
        rdual_inf = std::max(rdual_inf, std::abs(r[j]));
      }
    }
    double obj = 0.0;
    for (std::size_t j = 0; j < N; ++j) obj += q[j] * x[j];

    if (gap / std::max(1.0, std::abs(obj)) <= settings.tol_gap &&
        rprim_inf <= settings.tol_feas * (1.0 + s_inf) &&
        rdual_inf <= settings.tol_feas * (1.0 + lambda_inf)) {
      sol.status = SolveStatus::kOptimal;
      sol.iterations = iter;
      break;
    }

    // Newton matrix H = sum lambda_i hess f_i + sum (lambda_i/s_i) g g^T.
    H.clear();
    for (std::size_t i = 0; i < m; ++i) {
      const auto& row = cons[i];
      const double sigma = row_sigma(row);
      if (row.kind == detail::Ineq::Kind::kCone) {
        const double hcoef = lambda[i] * 2.0 / (sigma * sigma * sigma);
        for (int a = 0; a < row.nv; ++a) {
          for (int b = 0; b < row.nv; ++b) {
            if (row.var[a] >= row.var[b]) {
              H.add_symmetric(row.var[a], row.var[b], hcoef);
            }
          }
        }
      }
      const double scale = lambda[i] / s[i];
      const int slots = row_slots(row);
      for (int a = 0; a < slots; ++a) {
        const auto [va, ga] = row_grad(row, sigma, a);
        for (int b = a; b < slots; ++b) {
          const auto [vb, gb] = row_grad(row, sigma, b);
          H.add_symmetric(va, vb, scale * ga * gb);
        }
      }
    }
    for (std::size_t j = 0; j < N; ++j) {
      H.add_symmetric(j, j, 1e-12);
    }
    if (!H.factor()) {
      sol.status = SolveStatus::kMaxIterations;
      sol.iterations = iter;
      sol.message = "newton system lost positive definiteness";
      break;
    }

    // Predictor: affine step toward mu = 0.
    for (std::size_t i = 0; i < m; ++i) {
      r_cent[i] = -lambda[i] * s[i];
      weights[i] = lambda[i] + (r_cent[i] + lambda[i] * r_prim[i]) / s[i];
    }
    solve_direction(weights, dx);
    grad_dots(dx, grad_dot_dx);
    double alpha_aff = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      ds_aff[i] = -r_prim[i] - grad_dot_dx[i];
      dlam_aff[i] = (r_cent[i] - lambda[i] * ds_aff[i]) / s[i];
      if (ds_aff[i] < 0.0) {
        alpha_aff = std::min(alpha_aff, -s[i] / ds_aff[i]);
      }
      if (dlam_aff[i] < 0.0) {
        alpha_aff = std::min(alpha_aff, -lambda[i] / dlam_aff[i]);
      }
    }
    double gap_aff = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      gap_aff += (lambda[i] + alpha_aff * dlam_aff[i]) *
                 (s[i] + alpha_aff * ds_aff[i]);
    }
    gap_aff = std::max(gap_aff, 0.0);
    const double centering = std::min(1.0, std::pow(gap_aff / gap, 3.0));
    const double mu_target = centering * mu;

    // Corrector reuses the factorization.
    for (std::size_t i = 0; i < m; ++i) {
      r_cent[i] = mu_target - lambda[i] * s[i] - dlam_aff[i] * ds_aff[i];
      weights[i] = lambda[i] + (r_cent[i] + lambda[i] * r_prim[i]) / s[i];
    }
    solve_direction(weights, dx);
    grad_dots(dx, grad_dot_dx);
    double alpha = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      ds[i] = -r_prim[i] - grad_dot_dx[i];
      dlam[i] = (r_cent[i] - lambda[i] * ds[i]) / s[i];
      if (ds[i] < 0.0) alpha = std::min(alpha, -0.99 * s[i] / ds[i]);
      if (dlam[i] < 0.0) alpha = std::min(alpha, -0.99 * lambda[i] / dlam[i]);
    }
#ifdef DDTOPP_DEBUG_ITERS
    std::printf(
        "it=%3d gap=%10.3e mu_t=%10.3e a=%8.2e rp=%9.2e rd=%9.2e\n",
        iter, gap, mu_target, alpha, rprim_inf, rdual_inf);
#endif
    if (alpha < 1e-12) {
      sol.status = SolveStatus::kMaxIterations;
      sol.iterations = iter;
      sol.message = "step length collapsed";
      break;
    }
    for (std::size_t j = 0; j < N; ++j) x[j] += alpha * dx[j];
    for (std::size_t i = 0; i < m; ++i) {
      s[i] += alpha * ds[i];
      lambda[i] += alpha * dlam[i];
    }
    sol.iterations = iter + 1;
    if (iter + 1 == settings.max_iter) {
      sol.status = SolveStatus::kMaxIterations;
      sol.message = "iteration limit reached";
    }
  }

  // Reconstitute the full variable set.
  for (std::size_t k = 0; k < n; ++k) {
    sol.v[k] = fixed[k] ? fixed_value[k] : x[vindex[k]];
  }
  for (std::size_t k = 0; k < nseg; ++k) sol.c[k] = x[cindex[k]];
  sol.objective_value = 0.0;
  for (std::size_t k = 0; k < nseg; ++k) {
    sol.objective_value += 2.0 * p.ds[k] * sol.c[k];
  }
  return finish(sol);
}

}  // namespace ddtopp
