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

#ifndef TWRCR_OPTIMIZER_HPP
#define TWRCR_OPTIMIZER_HPP

#include <string>

#include "twrcr/effective_link.hpp"

namespace twrcr {

/// Per-antenna transmit powers at the terminals. Entries beyond m_min are
/// zero in any optimizer output (those eigen-channels carry no rate).
struct PowerAllocation {
  RVector p1;  ///< length m_t1
  RVector p2;  ///< length m_t2

  static PowerAllocation zero(int m_t1, int m_t2);
};

/// The 4+L Lagrange multipliers of the constrained program, all >= 0.
struct DualVariables {
  double lambda1 = 0.0;    ///< terminal T1 power budget
  double lambda2 = 0.0;    ///< terminal T2 power budget
  RVector lambda_r;        ///< per-relay output power budget, length L
  double lambda_th1 = 0.0; ///< first-slot interference
  double lambda_th2 = 0.0; ///< second-slot interference
};

enum class SolveStatus { converged, iteration_limit, infeasible };

std::string to_string(SolveStatus status);

struct SolveReport {
  PowerAllocation allocation;
  DualVariables duals;
  double rate = 0.0;  ///< bits/s/Hz at the reported allocation
  int iterations = 0;
  double max_constraint_violation = 0.0;  ///< most-positive constraint slack, linear power units
  double duality_gap_estimate = 0.0;      ///< best dual value minus best feasible rate
  SolveStatus status = SolveStatus::infeasible;
};

/// Subgradient schedule and stopping tolerances, surfaced through the CLI
/// config file.
struct SolverOptions {
  /// alpha_0 = step_scale * p_t_peak / max_i |g_i(0)| for the diminishing rule.
  double step_scale = 0.1;
  double initial_multiplier = 1e-3;
  int max_iterations = 100000;
  /// eps_feas = eps_feasibility_scale * p_t_peak.
  double eps_feasibility_scale = 1e-6;
  double eps_comp_slackness = 1e-5;
  /// "polyak": monotone descent built from a Polyak-sized trial step,
  /// alpha_t = (D(lambda_t) - best feasible rate) / |g|^2 (the best feasible
  /// rate lower-bounds the dual minimum), backtracked until the dual value
  /// decreases and then refined by a damped projected Newton step on the
  /// dual, which rescues the ill-conditioned tail of the descent.
  /// "diminishing": plain alpha_t = alpha_0 / sqrt(t) projected subgradient.
  enum class StepRule { polyak, diminishing };
  StepRule step_rule = StepRule::polyak;
};

/// The constraint polytope in compiled affine form. Row order:
/// [T1 power sum, T2 power sum, relay 1..L output power, slot-1 interference,
/// slot-2 interference]; the multiplier vector uses the same order. Every
/// constraint reads coef1 * p1 + coef2 * p2 + constant <= bound with
/// non-negative coefficients, so g = coef1*p1 + coef2*p2 + constant - bound
/// is the signed slack vector (feasible iff every entry <= 0).
struct ConstraintSystem {
  RMatrix coef1;     ///< (L+4) x m_t1
  RMatrix coef2;     ///< (L+4) x m_t2
  RVector constant;  ///< power-independent parts (noise terms)
  RVector bound;

  int rows() const { return static_cast<int>(bound.size()); }
  RVector slack(const RVector& p1, const RVector& p2) const {
    return coef1 * p1 + coef2 * p2 + constant - bound;
  }
};

ConstraintSystem build_constraint_system(const ChannelSet& channels,
                                         const AmplificationProfile& amp,
                                         const NetworkConfig& config);

/// Signed slacks of the four constraint families at one allocation, ordered
/// as in ConstraintSystem (length L+4). Feasible iff every entry <= 0.
RVector constraint_values(const PowerAllocation& alloc, const ChannelSet& channels,
                          const AmplificationProfile& amp, const NetworkConfig& config);

/// True iff the power-independent constraint parts already fit under their
/// bounds, i.e. the zero allocation is feasible. When false no non-negative
/// allocation is feasible and the solver reports infeasible.
bool check_structural_feasibility(const ChannelSet& channels, const AmplificationProfile& amp,
                                  const NetworkConfig& config);

/// Closed-form maximizer of the Lagrangian over non-negative powers:
///   P_m^q = (1 / (2 ln2 D_m^q) - N_m / sigma_mq^2)^+,
/// where D_m^q collects the multiplier-weighted constraint coefficients of
/// P_m^q. Entries with q > m_min or sigma_mq = 0 are zero. Throws
/// std::domain_error when some D_m^q = 0 on a live eigen-channel (the inner
/// maximization is unbounded there).
PowerAllocation closed_form_power(const DualVariables& duals, const EffectiveChannel& eff,
                                  const ChannelSet& channels, const AmplificationProfile& amp,
                                  const NetworkConfig& config);

/// L(lambda, P) = sum_rate(P) - lambda . g(P).
double lagrangian_value(const DualVariables& duals, const PowerAllocation& alloc,
                        const EffectiveChannel& eff, const ChannelSet& channels,
                        const AmplificationProfile& amp, const NetworkConfig& config);

/// Solves the dual problem min_{lambda>=0} max_{P>=0} L(lambda, P) by
/// projected subgradient, lambda <- max(0, lambda + alpha_t g(P(lambda))),
/// with P(lambda) from the closed form. Returns the converged iterate when
/// the feasibility and complementary-slackness tolerances are met, otherwise
/// the best feasible iterate found (candidates are made feasible by uniformly
/// scaling the power-dependent part down to the tightest violated bound).
SolveReport subgradient_solve(const ChannelSet& channels, const AmplificationProfile& amp,
                              const NetworkConfig& config, const SolverOptions& options = {});

struct KktResiduals {
  double primal_violation = 0.0;  ///< max(0, max_j g_j)
  double comp_slackness = 0.0;    ///< max_j |lambda_j g_j|
  double stationarity = 0.0;      ///< max over active coords of |dR/dP - lambda . dg/dP|
};

/// KKT residuals at a report's allocation/duals. The rate gradient is
/// sigma^2 / (2 ln2 (N + sigma^2 P)); only active coordinates (P > 0) enter
/// the stationarity residual. Requires report.status != infeasible.
KktResiduals kkt_residuals(const SolveReport& report, const ChannelSet& channels,
                           const AmplificationProfile& amp, const NetworkConfig& config,
                           const EffectiveChannel& eff);

}  // namespace twrcr

#endif  // TWRCR_OPTIMIZER_HPP
