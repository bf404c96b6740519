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

#include "twrcr/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace twrcr {

namespace {

constexpr double kTwoLn2 = 1.3862943611198906;  // 2 ln 2
constexpr double kInvLn2 = 1.4426950408889634;  // 1 / ln 2

void validate_shapes(const ChannelSet& channels, const AmplificationProfile& amp,
                     const NetworkConfig& config) {
  config.validate();
  const std::size_t l = static_cast<std::size_t>(config.num_relays);
  if (channels.h_1r.size() != l || channels.h_2r.size() != l || channels.h_rp.size() != l ||
      amp.w.size() != l)
    throw std::invalid_argument("relay counts disagree with config");
  for (std::size_t i = 0; i < l; ++i) {
    if (channels.h_1r[i].rows() != config.m_r || channels.h_1r[i].cols() != config.m_t1 ||
        channels.h_2r[i].rows() != config.m_r || channels.h_2r[i].cols() != config.m_t2 ||
        channels.h_rp[i].rows() != config.m_r || channels.h_rp[i].cols() != config.m_pu ||
        amp.w[i].size() != config.m_r)
      throw std::invalid_argument("relay matrix shapes disagree with config");
    if (amp.w[i].size() && amp.w[i].minCoeff() < 0.0)
      throw std::invalid_argument("amplification factors must be >= 0");
  }
  if (channels.h_1p.rows() != config.m_t1 || channels.h_1p.cols() != config.m_pu ||
      channels.h_2p.rows() != config.m_t2 || channels.h_2p.cols() != config.m_pu)
    throw std::invalid_argument("terminal-to-PU matrix shapes disagree with config");
}

RVector pack_duals(const DualVariables& duals, int num_relays) {
  if (duals.lambda_r.size() != num_relays)
    throw std::invalid_argument("lambda_r length disagrees with relay count");
  RVector lambda(num_relays + 4);
  lambda[0] = duals.lambda1;
  lambda[1] = duals.lambda2;
  lambda.segment(2, num_relays) = duals.lambda_r;
  lambda[num_relays + 2] = duals.lambda_th1;
  lambda[num_relays + 3] = duals.lambda_th2;
  return lambda;
}

DualVariables unpack_duals(const RVector& lambda, int num_relays) {
  DualVariables duals;
  duals.lambda1 = lambda[0];
  duals.lambda2 = lambda[1];
  duals.lambda_r = lambda.segment(2, num_relays);
  duals.lambda_th1 = lambda[num_relays + 2];
  duals.lambda_th2 = lambda[num_relays + 3];
  return duals;
}

double rate_at(const RVector& p1, const RVector& p2, const RVector& sigma1_sq,
               const RVector& sigma2_sq, double n1, double n2, int m_min) {
  double rate = 0.0;
  for (int q = 0; q < m_min; ++q) {
    rate += 0.5 * std::log1p(sigma2_sq[q] * p2[q] / n2) * kInvLn2;
    rate += 0.5 * std::log1p(sigma1_sq[q] * p1[q] / n1) * kInvLn2;
  }
  return rate;
}

// Maximizer of rate - d . p over 0 <= p <= cap, coordinate-wise. Coordinates
// beyond m_min or on dead eigen-channels carry no rate and get zero.
void boxed_inner_power(const RVector& d, const RVector& sigma_sq, double noise, int m_min,
                       double cap, RVector& p) {
  for (Eigen::Index q = 0; q < p.size(); ++q) {
    if (q >= m_min || sigma_sq[q] <= 0.0) {
      p[q] = 0.0;
    } else if (d[q] <= 0.0) {
      p[q] = cap;
    } else {
      p[q] = std::clamp(1.0 / (kTwoLn2 * d[q]) - noise / sigma_sq[q], 0.0, cap);
    }
  }
}

// Norm of the dual gradient projected onto the non-negative orthant: slack
// rows pinned at zero only count when they push inward.
double projected_gradient_norm(const RVector& lambda, const RVector& g) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    const double component = lambda[j] > 0.0 ? g[j] : std::max(g[j], 0.0);
    sum += component * component;
  }
  return std::sqrt(sum);
}

}  // namespace

PowerAllocation PowerAllocation::zero(int m_t1, int m_t2) {
  if (m_t1 < 1 || m_t2 < 1) throw std::invalid_argument("antenna counts must be >= 1");
  return {RVector::Zero(m_t1), RVector::Zero(m_t2)};
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged:
      return "converged";
    case SolveStatus::iteration_limit:
      return "iteration_limit";
    case SolveStatus::infeasible:
      return "infeasible";
  }
  return "unknown";
}

ConstraintSystem build_constraint_system(const ChannelSet& channels,
                                         const AmplificationProfile& amp,
                                         const NetworkConfig& config) {
  validate_shapes(channels, amp, config);
  const int l = config.num_relays;
  const int rows = l + 4;

  ConstraintSystem system;
  system.coef1 = RMatrix::Zero(rows, config.m_t1);
  system.coef2 = RMatrix::Zero(rows, config.m_t2);
  system.constant = RVector::Zero(rows);
  system.bound = RVector::Zero(rows);

  system.coef1.row(0).setOnes();
  system.bound[0] = config.p_t_peak;
  system.coef2.row(1).setOnes();
  system.bound[1] = config.p_t_peak;

  for (int i = 0; i < l; ++i) {
    const RVector w_sq = amp.w[i].array().square().matrix();
    system.coef1.row(2 + i) = w_sq.transpose() * channels.h_1r[i].cwiseAbs2();
    system.coef2.row(2 + i) = w_sq.transpose() * channels.h_2r[i].cwiseAbs2();
    system.constant[2 + i] = config.n0 * w_sq.sum();
    system.bound[2 + i] = config.p_r_peak;
  }

  system.coef1.row(l + 2) = channels.h_1p.cwiseAbs2().rowwise().sum().transpose();
  system.coef2.row(l + 2) = channels.h_2p.cwiseAbs2().rowwise().sum().transpose();
  system.bound[l + 2] = config.i_th;

  for (int i = 0; i < l; ++i) {
    // leak[k] = w_ik^2 sum_j |h_rpi(k, j)|^2, the relay-to-PU gain of whatever
    // power leaves antenna k of relay i.
    const RVector leak = (amp.w[i].array().square() *
                          channels.h_rp[i].cwiseAbs2().rowwise().sum().array())
                             .matrix();
    system.coef1.row(l + 3) += leak.transpose() * channels.h_1r[i].cwiseAbs2();
    system.coef2.row(l + 3) += leak.transpose() * channels.h_2r[i].cwiseAbs2();
    system.constant[l + 3] += config.n0 * leak.sum();
  }
  system.bound[l + 3] = config.i_th;

  return system;
}

RVector constraint_values(const PowerAllocation& alloc, const ChannelSet& channels,
                          const AmplificationProfile& amp, const NetworkConfig& config) {
  if (alloc.p1.size() != config.m_t1 || alloc.p2.size() != config.m_t2)
    throw std::invalid_argument("allocation lengths disagree with config");
  return build_constraint_system(channels, amp, config).slack(alloc.p1, alloc.p2);
}

bool check_structural_feasibility(const ChannelSet& channels, const AmplificationProfile& amp,
                                  const NetworkConfig& config) {
  const ConstraintSystem system = build_constraint_system(channels, amp, config);
  return (system.constant - system.bound).maxCoeff() <= 0.0;
}

PowerAllocation closed_form_power(const DualVariables& duals, const EffectiveChannel& eff,
                                  const ChannelSet& channels, const AmplificationProfile& amp,
                                  const NetworkConfig& config) {
  const ConstraintSystem system = build_constraint_system(channels, amp, config);
  const RVector lambda = pack_duals(duals, config.num_relays);
  const RVector d1 = system.coef1.transpose() * lambda;
  const RVector d2 = system.coef2.transpose() * lambda;

  PowerAllocation alloc = PowerAllocation::zero(config.m_t1, config.m_t2);
  const auto fill = [&](const RVector& d, const RVector& sigma, double noise, RVector& p) {
    for (Eigen::Index q = 0; q < p.size(); ++q) {
      if (q >= eff.m_min || sigma[q] <= 0.0) continue;
      if (d[q] <= 0.0)
        throw std::domain_error("inner maximization unbounded on a live eigen-channel");
      p[q] = std::max(0.0, 1.0 / (kTwoLn2 * d[q]) - noise / (sigma[q] * sigma[q]));
    }
  };
  fill(d1, eff.sigma1, eff.n1, alloc.p1);
  fill(d2, eff.sigma2, eff.n2, alloc.p2);
  return alloc;
}

double lagrangian_value(const DualVariables& duals, const PowerAllocation& alloc,
                        const EffectiveChannel& eff, const ChannelSet& channels,
                        const AmplificationProfile& amp, const NetworkConfig& config) {
  const RVector slack = constraint_values(alloc, channels, amp, config);
  const RVector lambda = pack_duals(duals, config.num_relays);
  return sum_rate(alloc.p1, alloc.p2, eff) - lambda.dot(slack);
}

SolveReport subgradient_solve(const ChannelSet& channels, const AmplificationProfile& amp,
                              const NetworkConfig& config, const SolverOptions& options) {
  const ConstraintSystem system = build_constraint_system(channels, amp, config);
  const EffectiveChannel eff = compute_effective_channels(channels, amp, config.n0);
  const int rows = system.rows();

  SolveReport report;
  report.allocation = PowerAllocation::zero(config.m_t1, config.m_t2);
  report.duals = unpack_duals(RVector::Zero(rows), config.num_relays);

  // g(0) = constant - bound: a positive entry means no allocation can satisfy
  // that row, since powers only add to the left-hand side.
  const RVector slack_at_zero = system.constant - system.bound;
  if (slack_at_zero.maxCoeff() > 0.0) {
    report.max_constraint_violation = slack_at_zero.maxCoeff();
    report.status = SolveStatus::infeasible;
    return report;
  }

  const RVector sigma1_sq = eff.sigma1.array().square().matrix();
  const RVector sigma2_sq = eff.sigma2.array().square().matrix();
  const double cap = config.p_t_peak;  // C1 already forces every coordinate under this
  const double eps_feas = options.eps_feasibility_scale * config.p_t_peak;

  double alpha0 = options.step_scale;
  const double g0_mag = slack_at_zero.cwiseAbs().maxCoeff();
  if (g0_mag > 0.0 && config.p_t_peak > 0.0) alpha0 = options.step_scale * config.p_t_peak / g0_mag;

  RVector lambda = RVector::Constant(rows, options.initial_multiplier);
  RVector d1(config.m_t1), d2(config.m_t2), p1_feas(config.m_t1), p2_feas(config.m_t2);

  // One dual evaluation: the inner closed-form maximizer, its slack vector,
  // and the dual value D(lambda) = rate - lambda . g.
  struct Eval {
    RVector p1, p2, g, power_part;
    double rate = 0.0, dual = 0.0;
  };
  Eval cur{RVector(config.m_t1), RVector(config.m_t2), RVector(rows), RVector(rows), 0.0, 0.0};
  Eval next = cur;
  const auto evaluate = [&](const RVector& multipliers, Eval& e) {
    d1.noalias() = system.coef1.transpose() * multipliers;
    d2.noalias() = system.coef2.transpose() * multipliers;
    boxed_inner_power(d1, sigma1_sq, eff.n1, eff.m_min, cap, e.p1);
    boxed_inner_power(d2, sigma2_sq, eff.n2, eff.m_min, cap, e.p2);
    e.power_part.noalias() = system.coef1 * e.p1;
    e.power_part.noalias() += system.coef2 * e.p2;
    e.g = e.power_part + system.constant - system.bound;
    e.rate = rate_at(e.p1, e.p2, sigma1_sq, sigma2_sq, eff.n1, eff.n2, eff.m_min);
    e.dual = e.rate - multipliers.dot(e.g);
  };
  evaluate(lambda, cur);

  double best_feasible_rate = 0.0;  // the zero allocation is feasible here
  RVector best_p1 = RVector::Zero(config.m_t1);
  RVector best_p2 = RVector::Zero(config.m_t2);
  double best_dual = std::numeric_limits<double>::infinity();
  double newton_mu = 1e-12;
  int iterations_done = 0;
  RVector lambda_next(rows);
  RMatrix hess(rows, rows);
  std::vector<char> free_set(static_cast<std::size_t>(rows));

  for (int t = 1; t <= options.max_iterations; ++t) {
    iterations_done = t;
    best_dual = std::min(best_dual, cur.dual);

    // Uniform down-scaling onto the tightest violated row keeps every row
    // feasible (the power-dependent parts are linear and non-negative), which
    // maintains a feasible incumbent at every iteration.
    double scale = 1.0;
    for (int j = 0; j < rows; ++j)
      if (cur.g[j] > 0.0)
        scale = std::min(scale, (system.bound[j] - system.constant[j]) / cur.power_part[j]);
    if (scale >= 1.0) {
      p1_feas = cur.p1;
      p2_feas = cur.p2;
    } else {
      scale = std::max(scale, 0.0);
      p1_feas = scale * cur.p1;
      p2_feas = scale * cur.p2;
    }
    const double feasible_rate =
        rate_at(p1_feas, p2_feas, sigma1_sq, sigma2_sq, eff.n1, eff.n2, eff.m_min);
    if (feasible_rate > best_feasible_rate) {
      best_feasible_rate = feasible_rate;
      best_p1 = p1_feas;
      best_p2 = p2_feas;
    }

    const double violation = cur.g.maxCoeff();
    const double comp_slackness = lambda.cwiseProduct(cur.g).cwiseAbs().maxCoeff();
    if (violation <= eps_feas && comp_slackness <= options.eps_comp_slackness) {
      report.allocation.p1 = cur.p1;
      report.allocation.p2 = cur.p2;
      report.duals = unpack_duals(lambda, config.num_relays);
      report.rate = cur.rate;
      report.iterations = t;
      report.max_constraint_violation = std::max(0.0, violation);
      report.duality_gap_estimate =
          std::max(0.0, best_dual - std::max(best_feasible_rate, cur.rate));
      report.status = SolveStatus::converged;
      return report;
    }

    const double g_norm_sq = cur.g.squaredNorm();
    if (g_norm_sq == 0.0) break;  // every row exactly tight; caught above unless eps_feas < 0
    if (options.step_rule == SolverOptions::StepRule::polyak) {
      // Polyak-sized trial step (best feasible rate lower-bounds the dual
      // minimum), backtracked until the dual actually decreases by a fraction
      // of ||move||^2 / alpha. The inner maximizer is unique, so the dual is
      // differentiable and monotone descent converges.
      double alpha = (cur.dual - best_feasible_rate) / g_norm_sq;
      if (!(alpha > 0.0)) alpha = alpha0 / std::sqrt(static_cast<double>(t));
      bool moved = false;
      for (int k = 0; k < 64; ++k) {
        lambda_next = (lambda + alpha * cur.g).cwiseMax(0.0);
        const double move_sq = (lambda_next - lambda).squaredNorm();
        if (move_sq == 0.0) break;
        evaluate(lambda_next, next);
        if (next.dual <= cur.dual - 0.1 * move_sq / alpha) {
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (moved) {
        lambda.swap(lambda_next);
        std::swap(cur, next);
      }

      // Projected Newton refinement. The dual Hessian over the multipliers is
      // sum_q a_q a_q^T / (2 ln2 D_q^2) over interior power coordinates (a_q
      // the q-th coefficient column), which is cheap at this dimension and
      // rescues the steepest-descent step from the 1/D_q^2 conditioning.
      d1.noalias() = system.coef1.transpose() * lambda;
      d2.noalias() = system.coef2.transpose() * lambda;
      hess.setZero();
      const auto add_curvature = [&](const RVector& d, const RVector& p, const RMatrix& coef) {
        for (Eigen::Index q = 0; q < p.size(); ++q) {
          if (p[q] <= 0.0 || p[q] >= cap) continue;
          hess.noalias() += (1.0 / (kTwoLn2 * d[q] * d[q])) * coef.col(q) * coef.col(q).transpose();
        }
      };
      add_curvature(d1, cur.p1, system.coef1);
      add_curvature(d2, cur.p2, system.coef2);
      int n_free = 0;
      for (int j = 0; j < rows; ++j) {
        free_set[j] = lambda[j] > 0.0 || cur.g[j] > 0.0;
        n_free += free_set[j];
      }
      if (n_free > 0) {
        RMatrix h_ff(n_free, n_free);
        RVector g_f(n_free);
        for (int j = 0, jj = 0; j < rows; ++j) {
          if (!free_set[j]) continue;
          g_f[jj] = cur.g[j];
          for (int i = 0, ii = 0; i < rows; ++i)
            if (free_set[i]) h_ff(jj, ii++) = hess(j, i);
          ++jj;
        }
        // Adaptive Levenberg damping: with more positive multipliers than
        // interior power coordinates the reduced Hessian is rank-deficient and
        // the undamped step blows up along its nullspace, where the dual is
        // locally linear. Raising the damping on rejection bends the step
        // toward the gradient until it reaches the orthant boundary and sheds
        // the redundant multiplier; shrinking it on acceptance restores
        // quadratic convergence where the Hessian has full rank.
        const double damp_unit = 1.0 + h_ff.trace();
        RMatrix h_damped(n_free, n_free);
        for (int attempt = 0; attempt < 8; ++attempt) {
          h_damped = h_ff;
          h_damped.diagonal().array() += newton_mu * damp_unit;
          const RVector delta = h_damped.ldlt().solve(g_f);
          if (delta.allFinite()) {
            lambda_next = lambda;
            for (int j = 0, jj = 0; j < rows; ++j)
              if (free_set[j]) lambda_next[j] = std::max(0.0, lambda[j] + delta[jj++]);
            if ((lambda_next - lambda).squaredNorm() > 0.0) {
              evaluate(lambda_next, next);
              // Once the dual flattens to machine precision its values stop
              // resolving true descent, so steps that stay within rounding
              // noise are accepted whenever they strictly shrink the projected
              // gradient: the quadratic tail keeps collapsing the residual,
              // and the merit decrease rules out cycling.
              const double noise =
                  4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(cur.dual));
              const bool within_noise =
                  next.dual <= cur.dual + noise &&
                  projected_gradient_norm(lambda_next, next.g) <
                      projected_gradient_norm(lambda, cur.g);
              if (next.dual < cur.dual || within_noise) {
                lambda.swap(lambda_next);
                std::swap(cur, next);
                moved = true;
                newton_mu = std::max(newton_mu * 0.1, 1e-14);
                break;
              }
            }
          }
          newton_mu = std::min(newton_mu * 100.0, 1e8);
        }
      }
      if (!moved) break;  // no descent in either direction: nothing further to move
    } else {
      lambda = (lambda + (alpha0 / std::sqrt(static_cast<double>(t))) * cur.g).cwiseMax(0.0);
      evaluate(lambda, cur);
    }
  }

  report.allocation.p1 = best_p1;
  report.allocation.p2 = best_p2;
  report.duals = unpack_duals(lambda, config.num_relays);
  report.rate = best_feasible_rate;
  report.iterations = iterations_done;
  report.max_constraint_violation = 0.0;
  report.duality_gap_estimate = std::max(0.0, best_dual - best_feasible_rate);
  report.status = SolveStatus::iteration_limit;
  return report;
}

KktResiduals kkt_residuals(const SolveReport& report, const ChannelSet& channels,
                           const AmplificationProfile& amp, const NetworkConfig& config,
                           const EffectiveChannel& eff) {
  if (report.status == SolveStatus::infeasible)
    throw std::invalid_argument("kkt_residuals needs a feasible report");
  const ConstraintSystem system = build_constraint_system(channels, amp, config);
  const RVector lambda = pack_duals(report.duals, config.num_relays);
  const RVector g = system.slack(report.allocation.p1, report.allocation.p2);

  KktResiduals res;
  res.primal_violation = std::max(0.0, g.maxCoeff());
  res.comp_slackness = lambda.cwiseProduct(g).cwiseAbs().maxCoeff();

  const RVector d1 = system.coef1.transpose() * lambda;
  const RVector d2 = system.coef2.transpose() * lambda;
  const auto stationarity = [&](const RVector& p, const RVector& sigma, double noise,
                                const RVector& d) {
    double worst = 0.0;
    for (Eigen::Index q = 0; q < p.size(); ++q) {
      if (p[q] <= 0.0) continue;
      const double sigma_sq = q < eff.m_min ? sigma[q] * sigma[q] : 0.0;
      const double grad = sigma_sq / (kTwoLn2 * (noise + sigma_sq * p[q]));
      worst = std::max(worst, std::abs(grad - d[q]));
    }
    return worst;
  };
  res.stationarity = std::max(stationarity(report.allocation.p1, eff.sigma1, eff.n1, d1),
                              stationarity(report.allocation.p2, eff.sigma2, eff.n2, d2));
  return res;
}

}  // namespace twrcr
