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

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "twrcr/channel.hpp"
#include "twrcr/optimizer.hpp"
#include "twrcr/oracle.hpp"

namespace {

twrcr::NetworkConfig base_config() {
  twrcr::NetworkConfig config;
  config.m_t1 = 2;
  config.m_t2 = 2;
  config.m_pu = 2;
  config.m_r = 2;
  config.num_relays = 4;
  config.p_t_peak = 100.0;  // 20 dBm
  config.p_r_peak = 10.0;   // 10 dBm
  config.i_th = 100.0;      // 20 dBm
  config.n0 = 0.1;
  return config;
}

// Slack evaluation written directly from the constraint definitions with
// scalar loops, sharing nothing with the compiled ConstraintSystem.
twrcr::RVector direct_slacks(const twrcr::RVector& p1, const twrcr::RVector& p2,
                             const twrcr::ChannelSet& channels,
                             const twrcr::AmplificationProfile& amp,
                             const twrcr::NetworkConfig& config) {
  const int rows = config.num_relays + 4;
  twrcr::RVector g = twrcr::RVector::Zero(rows);
  g[0] = p1.sum() - config.p_t_peak;
  g[1] = p2.sum() - config.p_t_peak;
  for (int i = 0; i < config.num_relays; ++i) {
    double out = 0.0;
    for (int k = 0; k < config.m_r; ++k) {
      double received = config.n0;
      for (int v = 0; v < config.m_t1; ++v)
        received += p1[v] * std::norm(channels.h_1r[i](k, v));
      for (int u = 0; u < config.m_t2; ++u)
        received += p2[u] * std::norm(channels.h_2r[i](k, u));
      out += received * amp.w[i][k] * amp.w[i][k];
    }
    g[2 + i] = out - config.p_r_peak;
  }
  double slot1 = 0.0;
  for (int j = 0; j < config.m_pu; ++j) {
    for (int v = 0; v < config.m_t1; ++v) slot1 += p1[v] * std::norm(channels.h_1p(v, j));
    for (int u = 0; u < config.m_t2; ++u) slot1 += p2[u] * std::norm(channels.h_2p(u, j));
  }
  g[rows - 2] = slot1 - config.i_th;
  double slot2 = 0.0;
  for (int i = 0; i < config.num_relays; ++i)
    for (int j = 0; j < config.m_pu; ++j)
      for (int k = 0; k < config.m_r; ++k) {
        double received = config.n0;
        for (int v = 0; v < config.m_t1; ++v)
          received += p1[v] * std::norm(channels.h_1r[i](k, v));
        for (int u = 0; u < config.m_t2; ++u)
          received += p2[u] * std::norm(channels.h_2r[i](k, u));
        slot2 += received * amp.w[i][k] * amp.w[i][k] * std::norm(channels.h_rp[i](k, j));
      }
  g[rows - 1] = slot2 - config.i_th;
  return g;
}

twrcr::RVector pack(const twrcr::DualVariables& duals, int num_relays) {
  twrcr::RVector lambda(num_relays + 4);
  lambda[0] = duals.lambda1;
  lambda[1] = duals.lambda2;
  lambda.segment(2, num_relays) = duals.lambda_r;
  lambda[num_relays + 2] = duals.lambda_th1;
  lambda[num_relays + 3] = duals.lambda_th2;
  return lambda;
}

twrcr::DualVariables unpack(const twrcr::RVector& lambda, int num_relays) {
  twrcr::DualVariables duals;
  duals.lambda1 = lambda[0];
  duals.lambda2 = lambda[1];
  duals.lambda_r = lambda.segment(2, num_relays);
  duals.lambda_th1 = lambda[num_relays + 2];
  duals.lambda_th2 = lambda[num_relays + 3];
  return duals;
}

// Dual function D(lambda) through the public closed form and Lagrangian.
double dual_value(const twrcr::RVector& lambda, const twrcr::EffectiveChannel& eff,
                  const twrcr::ChannelSet& channels, const twrcr::AmplificationProfile& amp,
                  const twrcr::NetworkConfig& config) {
  const twrcr::DualVariables duals = unpack(lambda, config.num_relays);
  const twrcr::PowerAllocation alloc =
      twrcr::closed_form_power(duals, eff, channels, amp, config);
  return twrcr::lagrangian_value(duals, alloc, eff, channels, amp, config);
}

}  // namespace

TEST_CASE("compiled constraint rows match the direct definition") {
  const twrcr::NetworkConfig config = base_config();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const twrcr::ChannelSet channels = twrcr::generate_rayleigh_channels(config, seed);
    const twrcr::AmplificationProfile amp =
        twrcr::AmplificationProfile::uniform(0.2, config.num_relays, config.m_r);
    const twrcr::ConstraintSystem system =
        twrcr::build_constraint_system(channels, amp, config);
    REQUIRE(system.rows() == config.num_relays + 4);
    REQUIRE(system.coef1.cols() == config.m_t1);
    REQUIRE(system.coef2.cols() == config.m_t2);
    CHECK(system.coef1.minCoeff() >= 0.0);
    CHECK(system.coef2.minCoeff() >= 0.0);
    twrcr::RVector p1(config.m_t1), p2(config.m_t2);
    p1 << 13.0, 41.0;
    p2 << 7.5, 28.0;
    const twrcr::RVector direct = direct_slacks(p1, p2, channels, amp, config);
    const twrcr::RVector compiled = system.slack(p1, p2);
    REQUIRE(compiled.size() == direct.size());
    for (int j = 0; j < direct.size(); ++j)
      CHECK(compiled[j] == doctest::Approx(direct[j]).epsilon(1e-12));
    const twrcr::PowerAllocation alloc{p1, p2};
    const twrcr::RVector values = twrcr::constraint_values(alloc, channels, amp, config);
    for (int j = 0; j < direct.size(); ++j)
      CHECK(values[j] == doctest::Approx(direct[j]).epsilon(1e-12));
  }
}

TEST_CASE("structural feasibility tracks the power-independent terms") {
  twrcr::NetworkConfig config = base_config();
  const twrcr::ChannelSet channels = twrcr::generate_rayleigh_channels(config, 1);
  CHECK(twrcr::check_structural_feasibility(
      channels, twrcr::AmplificationProfile::uniform(0.2, config.num_relays, config.m_r),
      config));
  // Noise alone through gain 100 exceeds the relay budget: n0 sum w^2 =
  // 0.1 * 2 * 10^4 = 2000 > 10, independent of terminal powers.
  const twrcr::AmplificationProfile loud =
      twrcr::AmplificationProfile::uniform(100.0, config.num_relays, config.m_r);
  CHECK_FALSE(twrcr::check_structural_feasibility(channels, loud, config));
  const twrcr::SolveReport report = twrcr::subgradient_solve(channels, loud, config);
  CHECK(report.status == twrcr::SolveStatus::infeasible);
  CHECK(report.rate == 0.0);
}

TEST_CASE("zero interference budget is structurally infeasible") {
  twrcr::NetworkConfig config = base_config();
  config.i_th = 0.0;
  const twrcr::ChannelSet channels = twrcr::generate_rayleigh_channels(config, 4);
  const twrcr::AmplificationProfile amp =
      twrcr::AmplificationProfile::uniform(0.2, config.num_relays, config.m_r);
  // The second-slot row forwards relay noise to the primary user even at zero
  // terminal power, so its constant term already exceeds the zero bound.
  CHECK_FALSE(twrcr::check_structural_feasibility(channels, amp, config));
  const twrcr::SolveReport report = twrcr::subgradient_solve(channels, amp, config);
  CHECK(report.status == twrcr::SolveStatus::infeasible);
  CHECK_THROWS_AS(
      twrcr::kkt_residuals(report, channels, amp, config,
                           twrcr::compute_effective_channels(channels, amp, config.n0)),
      std::invalid_argument);
}

TEST_CASE("closed-form powers behave at the multiplier extremes") {
  const twrcr::NetworkConfig config = base_config();
  const twrcr::ChannelSet channels = twrcr::generate_rayleigh_channels(config, 8);
  const twrcr::AmplificationProfile amp =
      twrcr::AmplificationProfile::uniform(0.2, config.num_relays, config.m_r);
  const twrcr::EffectiveChannel eff = twrcr::compute_effective_channels(channels, amp, config.n0);

  twrcr::DualVariables huge;
  huge.lambda1 = 1e9;
  huge.lambda2 = 1e9;
  huge.lambda_r = twrcr::RVector::Constant(config.num_relays, 1e9);
  huge.lambda_th1 = 1e9;
  huge.lambda_th2 = 1e9;
  const twrcr::PowerAllocation starved =
      twrcr::closed_form_power(huge, eff, channels, amp, config);
  CHECK(starved.p1.cwiseAbs().maxCoeff() == 0.0);
  CHECK(starved.p2.cwiseAbs().maxCoeff() == 0.0);

  // All multipliers zero makes the inner maximization unbounded on any live
  // eigen-channel.
  twrcr::DualVariables zero;
  zero.lambda_r = twrcr::RVector::Zero(config.num_relays);
  CHECK_THROWS_AS(twrcr::closed_form_power(zero, eff, channels, amp, config),
                  std::domain_error);
}

TEST_CASE("closed-form powers never grow in any multiplier") {
  const twrcr::NetworkConfig config = base_config();
  const twrcr::ChannelSet channels = twrcr::generate_rayleigh_channels(config, 9);
  const twrcr::AmplificationProfile amp =
      twrcr::AmplificationProfile::uniform(0.2, config.num_relays, config.m_r);
  const twrcr::EffectiveChannel eff = twrcr::compute_effective_channels(channels, amp, config.n0);
  const int rows = config.num_relays + 4;
  twrcr::RVector lambda = twrcr::RVector::Constant(rows, 1e-3);
  const twrcr::PowerAllocation at_base =
      twrcr::closed_form_power(unpack(lambda, config.num_relays), eff, channels, amp, config);
  for (int j = 0; j < rows; ++j) {
    twrcr::RVector bumped = lambda;
    bumped[j] *= 4.0;
    const twrcr::PowerAllocation at_bumped =
        twrcr::closed_form_power(unpack(bumped, config.num_relays), eff, channels, amp, config);
    CHECK((at_bumped.p1 - at_base.p1).maxCoeff() <= 1e-12);
    CHECK((at_bumped.p2 - at_base.p2).maxCoeff() <= 1e-12);
  }
}

TEST_CASE("eigen-channels beyond m_min never receive power") {
  twrcr::NetworkConfig config = base_config();
  config.m_t2 = 3;  // m_min stays 2
  const twrcr::ChannelSet channels = twrcr::generate_rayleigh_channels(config, 10);
  const twrcr::AmplificationProfile amp =
      twrcr::AmplificationProfile::uniform(0.2, config.num_relays, config.m_r);
  const twrcr::EffectiveChannel eff = twrcr::compute_effective_channels(channels, amp, config.n0);
  twrcr::DualVariables duals;
  duals.lambda1 = 1e-2;
  duals.lambda2 = 1e-2;
  duals.lambda_r = twrcr::RVector::Constant(config.num_relays, 1e-3);
  duals.lambda_th1 = 1e-3;
  duals.lambda_th2 = 1e-3;
  const twrcr::PowerAllocation alloc =
      twrcr::closed_form_power(duals, eff, channels, amp, config);
  REQUIRE(alloc.p2.size() == 3);
  CHECK(alloc.p2[2] == 0.0);
  const twrcr::SolveReport report = twrcr::subgradient_solve(channels, amp, config);
  REQUIRE(report.status == twrcr::SolveStatus::converged);
  CHECK(report.allocation.p2[2] == 0.0);
}

TEST_CASE("lagrangian composes the rate and the weighted slacks") {
  const twrcr::NetworkConfig config = base_config();
  const twrcr::ChannelSet channels = twrcr::generate_rayleigh_channels(config, 12);
  const twrcr::AmplificationProfile amp =
      twrcr::AmplificationProfile::uniform(0.2, config.num_relays, config.m_r);
  const twrcr::EffectiveChannel eff = twrcr::compute_effective_channels(channels, amp, config.n0);
  twrcr::PowerAllocation alloc;
  alloc.p1 = twrcr::RVector::Constant(config.m_t1, 30.0);
  alloc.p2 = twrcr::RVector::Constant(config.m_t2, 20.0);
  twrcr::RVector lambda(config.num_relays + 4);
  lambda << 0.01, 0.02, 0.003, 0.004, 0.005, 0.006, 0.07, 0.08;
  const twrcr::DualVariables duals = unpack(lambda, config.num_relays);
  const double expected =
      twrcr::sum_rate(alloc.p1, alloc.p2, eff) -
      lambda.dot(direct_slacks(alloc.p1, alloc.p2, channels, amp, config));
  CHECK(twrcr::lagrangian_value(duals, alloc, eff, channels, amp, config) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("solver converges on the canonical instance with tight residuals") {
  const twrcr::NetworkConfig config = base_config();
  const twrcr::ChannelSet channels = twrcr::generate_rayleigh_channels(config, 1);
  const twrcr::AmplificationProfile amp =
      twrcr::AmplificationProfile::uniform(0.2, config.num_relays, config.m_r);
  const twrcr::SolveReport report = twrcr::subgradient_solve(channels, amp, config);
  REQUIRE(report.status == twrcr::SolveStatus::converged);
  CHECK(report.rate == doctest::Approx(12.0953918848).epsilon(1e-9));
  CHECK(report.allocation.p1.minCoeff() >= 0.0);
  CHECK(report.allocation.p2.minCoeff() >= 0.0);
  CHECK(report.max_constraint_violation <= 1e-6 * config.p_t_peak);
  CHECK(report.duality_gap_estimate <= 1e-3 * report.rate);

  const twrcr::EffectiveChannel eff = twrcr::compute_effective_channels(channels, amp, config.n0);
  const twrcr::KktResiduals kkt = twrcr::kkt_residuals(report, channels, amp, config, eff);
  CHECK(kkt.primal_violation <= 1e-6 * config.p_t_peak);
  CHECK(kkt.comp_slackness <= 1e-5);
  CHECK(kkt.stationarity <= 1e-6);

  // Multipliers are reported non-negative in the packed order.
  const twrcr::RVector lambda = pack(report.duals, config.num_relays);
  CHECK(lambda.minCoeff() >= 0.0);
}

TEST_CASE("dual value at the returned multipliers dominates the primal rate") {
  const twrcr::NetworkConfig config = base_config();
  for (std::uint64_t seed = 21; seed <= 25; ++seed) {
    const twrcr::ChannelSet channels = twrcr::generate_rayleigh_channels(config, seed);
    const twrcr::AmplificationProfile amp =
        twrcr::AmplificationProfile::uniform(0.25, config.num_relays, config.m_r);
    const twrcr::SolveReport report = twrcr::subgradient_solve(channels, amp, config);
    REQUIRE(report.status == twrcr::SolveStatus::converged);
    const twrcr::EffectiveChannel eff =
        twrcr::compute_effective_channels(channels, amp, config.n0);
    const double dual = dual_value(pack(report.duals, config.num_relays), eff, channels, amp,
                                   config);
    CHECK(dual >= report.rate - 1e-6);
  }
}

TEST_CASE("dual function is convex along random segments") {
  const twrcr::NetworkConfig config = base_config();
  const twrcr::ChannelSet channels = twrcr::generate_rayleigh_channels(config, 31);
  const twrcr::AmplificationProfile amp =
      twrcr::AmplificationProfile::uniform(0.2, config.num_relays, config.m_r);
  const twrcr::EffectiveChannel eff = twrcr::compute_effective_channels(channels, amp, config.n0);
  const int rows = config.num_relays + 4;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> uniform(1e-4, 1e-1);
  for (int rep = 0; rep < 20; ++rep) {
    twrcr::RVector a(rows), b(rows);
    for (int j = 0; j < rows; ++j) {
      a[j] = uniform(rng);
      b[j] = uniform(rng);
    }
    const double mid = dual_value(0.5 * (a + b), eff, channels, amp, config);
    const double avg = 0.5 * (dual_value(a, eff, channels, amp, config) +
                              dual_value(b, eff, channels, amp, config));
    CHECK(mid <= avg + 1e-9);
  }
}

TEST_CASE("relaxed coupling constraints reduce to per-terminal water-filling") {
  twrcr::NetworkConfig config = base_config();
  config.p_r_peak = 1e6 * config.p_t_peak;
  config.i_th = 1e6 * config.p_t_peak;
  twrcr::SolverOptions options;
  options.eps_comp_slackness = 1e-9;
  options.eps_feasibility_scale = 1e-9;
  for (std::uint64_t seed = 51; seed <= 55; ++seed) {
    const twrcr::ChannelSet channels = twrcr::generate_rayleigh_channels(config, seed);
    const twrcr::AmplificationProfile amp =
        twrcr::AmplificationProfile::uniform(0.2, config.num_relays, config.m_r);
    const twrcr::SolveReport report = twrcr::subgradient_solve(channels, amp, config, options);
    REQUIRE(report.status == twrcr::SolveStatus::converged);
    const twrcr::EffectiveChannel eff =
        twrcr::compute_effective_channels(channels, amp, config.n0);
    const twrcr::RVector wf1 = twrcr::waterfill_bisection(
        eff.sigma1.cwiseAbs2(), eff.n1, config.p_t_peak);
    const twrcr::RVector wf2 = twrcr::waterfill_bisection(
        eff.sigma2.cwiseAbs2(), eff.n2, config.p_t_peak);
    for (int q = 0; q < eff.m_min; ++q) {
      CHECK(std::abs(report.allocation.p1[q] - wf1[q]) <= 1e-6);
      CHECK(std::abs(report.allocation.p2[q] - wf2[q]) <= 1e-6);
    }
  }
}

TEST_CASE("solver agrees with the projected-gradient oracle") {
  twrcr::NetworkConfig config = base_config();
  config.p_r_peak = 10.0;
  config.i_th = 10.0;
  for (std::uint64_t seed = 61; seed <= 66; ++seed) {
    config.num_relays = 1 + static_cast<int>(seed % 2);
    const twrcr::ChannelSet channels = twrcr::generate_rayleigh_channels(config, seed);
    const twrcr::AmplificationProfile amp = twrcr::AmplificationProfile::uniform(
        0.05 + 0.05 * static_cast<double>(seed % 9), config.num_relays, config.m_r);
    if (!twrcr::check_structural_feasibility(channels, amp, config)) continue;
    const twrcr::SolveReport report = twrcr::subgradient_solve(channels, amp, config);
    REQUIRE(report.status == twrcr::SolveStatus::converged);
    const twrcr::EffectiveChannel eff =
        twrcr::compute_effective_channels(channels, amp, config.n0);
    const twrcr::PowerAllocation reference =
        twrcr::projected_gradient_solve(channels, amp, config);
    const double oracle_rate = twrcr::sum_rate(reference.p1, reference.p2, eff);
    CHECK(std::abs(report.rate - oracle_rate) <= 1e-3 * std::max(1.0, oracle_rate));
  }
}

TEST_CASE("diminishing schedule reaches the same optimum on the canonical instance") {
  const twrcr::NetworkConfig config = base_config();
  const twrcr::ChannelSet channels = twrcr::generate_rayleigh_channels(config, 1);
  const twrcr::AmplificationProfile amp =
      twrcr::AmplificationProfile::uniform(0.2, config.num_relays, config.m_r);
  twrcr::SolverOptions options;
  options.step_rule = twrcr::SolverOptions::StepRule::diminishing;
  const twrcr::SolveReport report = twrcr::subgradient_solve(channels, amp, config, options);
  REQUIRE(report.status == twrcr::SolveStatus::converged);
  CHECK(report.rate == doctest::Approx(12.0953918848).epsilon(1e-4));
}
