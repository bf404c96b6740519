// Copyright 2026 The twrcr Authors
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

#include "twrcr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace twrcr {

namespace {

constexpr double kTwoLn2 = 1.3862943611198906;
constexpr double kInvLn2 = 1.4426950408889634;

// The polytope {x >= 0, a x <= b} over the stacked coordinates [p1; p2],
// with b = bound - constant (non-negative when the zero point is feasible).
struct Polytope {
  RMatrix a;
  RVector b;
  RVector a_norm_sq;

  static Polytope from(const ConstraintSystem& system) {
    Polytope poly;
    poly.a.resize(system.rows(), system.coef1.cols() + system.coef2.cols());
    poly.a << system.coef1, system.coef2;
    poly.b = system.bound - system.constant;
    poly.a_norm_sq = poly.a.rowwise().squaredNorm();
    return poly;
  }
};

// Dykstra's alternating projections with per-set correction terms, which
// converge to the exact Euclidean projection onto the intersection (plain
// cyclic projection only finds some point of the intersection).
RVector project(const Polytope& poly, RVector x, const OracleOptions& options) {
  const int rows = static_cast<int>(poly.b.size());
  RVector q_orthant = RVector::Zero(x.size());
  RMatrix q_row = RMatrix::Zero(rows, x.size());
  RVector y(x.size()), x_next(x.size());
  for (int sweep = 0; sweep < options.max_projection_sweeps; ++sweep) {
    double delta = 0.0;
    y = x + q_orthant;
    x_next = y.cwiseMax(0.0);
    q_orthant = y - x_next;
    delta = std::max(delta, (x_next - x).cwiseAbs().maxCoeff());
    x = x_next;
    for (int j = 0; j < rows; ++j) {
      if (poly.a_norm_sq[j] <= 0.0) continue;  // all-zero row is always satisfied
      y = x + q_row.row(j).transpose();
      const double violation = poly.a.row(j).dot(y) - poly.b[j];
      if (violation > 0.0)
        x_next = y - (violation / poly.a_norm_sq[j]) * poly.a.row(j).transpose();
      else
        x_next = y;
      q_row.row(j) = (y - x_next).transpose();
      delta = std::max(delta, (x_next - x).cwiseAbs().maxCoeff());
      x = x_next;
    }
    if (delta <= options.projection_tol) break;
  }
  return x;
}

double stacked_rate(const RVector& x, const EffectiveChannel& eff, int m_t1) {
  double rate = 0.0;
  for (int q = 0; q < eff.m_min; ++q) {
    rate += 0.5 * std::log1p(eff.sigma2[q] * eff.sigma2[q] * x[m_t1 + q] / eff.n2) * kInvLn2;
    rate += 0.5 * std::log1p(eff.sigma1[q] * eff.sigma1[q] * x[q] / eff.n1) * kInvLn2;
  }
  return rate;
}

void stacked_gradient(const RVector& x, const EffectiveChannel& eff, int m_t1, RVector& grad) {
  grad.setZero();
  for (int q = 0; q < eff.m_min; ++q) {
    const double s1 = eff.sigma1[q] * eff.sigma1[q];
    const double s2 = eff.sigma2[q] * eff.sigma2[q];
    grad[q] = s1 / (kTwoLn2 * (eff.n1 + s1 * x[q]));
    grad[m_t1 + q] = s2 / (kTwoLn2 * (eff.n2 + s2 * x[m_t1 + q]));
  }
}

PowerAllocation split(const RVector& x, int m_t1, int m_t2) {
  return {x.head(m_t1), x.tail(m_t2)};
}

}  // namespace

PowerAllocation projected_gradient_solve(const ChannelSet& channels,
                                         const AmplificationProfile& amp,
                                         const NetworkConfig& config,
                                         const OracleOptions& options) {
  const ConstraintSystem system = build_constraint_system(channels, amp, config);
  const EffectiveChannel eff = compute_effective_channels(channels, amp, config.n0);
  Polytope poly = Polytope::from(system);
  if (poly.b.minCoeff() < 0.0) throw std::domain_error("zero allocation is infeasible");

  const int n = config.m_t1 + config.m_t2;
  RVector x = RVector::Zero(n), grad(n);
  double f = 0.0;
  double step = 1.0;

  for (int it = 0; it < options.max_iterations; ++it) {
    stacked_gradient(x, eff, config.m_t1, grad);
    const RVector x_map = project(poly, x + grad, options);
    if ((x_map - x).norm() <= options.tol_gradient_mapping) break;

    // Armijo search along the projection arc: accept a step when the increase
    // beats a fraction of ||move||^2 / step.
    step = std::min(step * 2.0, 1e12);
    bool accepted = false;
    while (step >= 1e-18) {
      const RVector x_cand = step == 1.0 ? x_map : project(poly, x + step * grad, options);
      const double move_sq = (x_cand - x).squaredNorm();
      if (move_sq == 0.0) break;
      const double f_cand = stacked_rate(x_cand, eff, config.m_t1);
      if (f_cand - f >= 0.1 / step * move_sq) {
        x = x_cand;
        f = f_cand;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }

  // Dykstra leaves at-most-projection_tol residuals, including slightly
  // negative coordinates; clamping first and then uniformly down-scaling onto
  // the tightest violated row makes the result exactly feasible.
  x = x.cwiseMax(0.0);
  const RVector lhs = poly.a * x;
  double scale = 1.0;
  for (int j = 0; j < static_cast<int>(poly.b.size()); ++j)
    if (lhs[j] > poly.b[j]) scale = std::min(scale, poly.b[j] / lhs[j]);
  if (scale < 1.0) x *= std::max(scale, 0.0);

  return split(x, config.m_t1, config.m_t2);
}

PowerAllocation grid_search_solve(const ChannelSet& channels, const AmplificationProfile& amp,
                                  const NetworkConfig& config, int grid_steps) {
  if (config.m_t1 + config.m_t2 > 4)
    throw std::invalid_argument("grid search is limited to 4 power coordinates");
  if (grid_steps < 1) throw std::invalid_argument("grid_steps must be >= 1");
  const ConstraintSystem system = build_constraint_system(channels, amp, config);
  const EffectiveChannel eff = compute_effective_channels(channels, amp, config.n0);
  const Polytope poly = Polytope::from(system);
  if (poly.b.minCoeff() < 0.0) throw std::domain_error("zero allocation is infeasible");

  const int n = config.m_t1 + config.m_t2;
  const int rows = static_cast<int>(poly.b.size());
  const double h = config.p_t_peak / grid_steps;
  if (h <= 0.0) return PowerAllocation::zero(config.m_t1, config.m_t2);
  // Grid values k*h can overshoot an exactly-tight bound by rounding, so
  // feasibility carries a small absolute slop scaled to the bounds.
  const double feas_tol = 1e-9 * std::max(1.0, system.bound.cwiseAbs().maxCoeff());

  // Enumerates the first n-1 coordinates; the rate never decreases in the
  // last coordinate, so its best grid value for a fixed prefix is the largest
  // feasible one. That choice matches full enumeration point for point.
  std::vector<int> idx(n - 1, 0);
  RVector p = RVector::Zero(n), lhs(rows);
  RVector best_x = RVector::Zero(n);
  double best_rate = 0.0;
  const auto a_last = poly.a.col(n - 1);

  for (;;) {
    for (int c = 0; c < n - 1; ++c) p[c] = idx[c] * h;
    lhs.noalias() = poly.a.leftCols(n - 1) * p.head(n - 1);

    bool prefix_ok = true;
    double limit = std::numeric_limits<double>::infinity();
    for (int j = 0; j < rows; ++j) {
      const double room = poly.b[j] - lhs[j] + feas_tol;
      if (a_last[j] > 0.0)
        limit = std::min(limit, room / a_last[j]);
      else if (room < 0.0)
        prefix_ok = false;
    }
    if (prefix_ok) {
      int m = grid_steps;
      if (limit / h < grid_steps) m = static_cast<int>(std::floor(limit / h)) + 1;
      m = std::min(m, grid_steps);
      while (m >= 0) {
        bool ok = true;
        for (int j = 0; j < rows; ++j)
          if (lhs[j] + a_last[j] * (m * h) - poly.b[j] > 0.0) {
            ok = false;
            break;
          }
        if (ok) break;
        --m;
      }
      if (m >= 0) {
        p[n - 1] = m * h;
        const double rate = stacked_rate(p, eff, config.m_t1);
        if (rate > best_rate) {
          best_rate = rate;
          best_x = p;
        }
      }
    }

    int c = 0;
    while (c < n - 1 && ++idx[c] > grid_steps) idx[c++] = 0;
    if (c == n - 1) break;
  }
  return split(best_x, config.m_t1, config.m_t2);
}

RVector waterfill_bisection(const RVector& sigma_sq, double noise, double budget) {
  if (!(noise > 0.0)) throw std::invalid_argument("noise must be > 0");
  if (!(budget >= 0.0) || !std::isfinite(budget))
    throw std::invalid_argument("budget must be finite and >= 0");
  if (sigma_sq.size() && sigma_sq.minCoeff() < 0.0)
    throw std::invalid_argument("channel gains must be >= 0");

  RVector p = RVector::Zero(sigma_sq.size());
  double cost_min = std::numeric_limits<double>::infinity();
  for (Eigen::Index q = 0; q < sigma_sq.size(); ++q)
    if (sigma_sq[q] > 0.0) cost_min = std::min(cost_min, noise / sigma_sq[q]);
  if (!std::isfinite(cost_min) || budget == 0.0) return p;

  // sum_q (mu - noise/sigma_sq_q)^+ grows continuously from 0 at mu = cost_min
  // and reaches at least `budget` at mu = cost_min + budget.
  double lo = cost_min, hi = cost_min + budget;
  for (int it = 0; it < 200; ++it) {
    const double mu = 0.5 * (lo + hi);
    double total = 0.0;
    for (Eigen::Index q = 0; q < sigma_sq.size(); ++q)
      if (sigma_sq[q] > 0.0) total += std::max(0.0, mu - noise / sigma_sq[q]);
    (total < budget ? lo : hi) = mu;
  }
  const double mu = 0.5 * (lo + hi);
  for (Eigen::Index q = 0; q < sigma_sq.size(); ++q)
    if (sigma_sq[q] > 0.0) p[q] = std::max(0.0, mu - noise / sigma_sq[q]);
  return p;
}

}  // namespace twrcr
