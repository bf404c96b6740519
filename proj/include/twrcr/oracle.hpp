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

#ifndef TWRCR_ORACLE_HPP
#define TWRCR_ORACLE_HPP

#include "twrcr/optimizer.hpp"

namespace twrcr {

// Independent brute-force reference solvers. They share only the rate and
// constraint definitions with the dual pipeline, never its closed-form power
// expression, so they are valid cross-checks for it. Accuracy over speed.

struct OracleOptions {
  double tol_gradient_mapping = 1e-8;  ///< stop when ||x - proj(x + grad)|| <= tol
  int max_iterations = 200000;
  double projection_tol = 1e-12;  ///< Dykstra coordinate tolerance
  int max_projection_sweeps = 20000;
};

/// Maximizes the sum rate over the constraint polytope by gradient ascent
/// with Dykstra projection onto the half-spaces plus the non-negative
/// orthant, with backtracking line search. Concave objective over a convex
/// polytope, so the result is a global optimum. Throws std::domain_error when
/// the zero allocation is already infeasible.
PowerAllocation projected_gradient_solve(const ChannelSet& channels,
                                         const AmplificationProfile& amp,
                                         const NetworkConfig& config,
                                         const OracleOptions& options = {});

/// Exhaustive search over the uniform grid {0, h, 2h, ..., p_t_peak}^(m_t1+m_t2)
/// with h = p_t_peak / grid_steps, keeping the best feasible point. Guarded to
/// m_t1 + m_t2 <= 4 coordinates; throws std::invalid_argument beyond that.
PowerAllocation grid_search_solve(const ChannelSet& channels, const AmplificationProfile& amp,
                                  const NetworkConfig& config, int grid_steps);

/// Textbook single-budget water-filler, solved by bisection on the water
/// level: p_q = (mu - noise / sigma_sq_q)^+ with sum_q p_q = budget (or all
/// mass on the positive-gain channels when the budget saturates none).
RVector waterfill_bisection(const RVector& sigma_sq, double noise, double budget);

}  // namespace twrcr

#endif  // TWRCR_ORACLE_HPP
