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

#include "twrcr/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

namespace twrcr {

namespace {

std::string fmt(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

void validate_sweep_values(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("sweep_values must be non-empty");
  for (std::size_t i = 0; i + 1 < values.size(); ++i)
    if (!(values[i] < values[i + 1]))
      throw std::invalid_argument("sweep_values must be strictly increasing");
}

std::string describe(const SweepSpec& spec, const char* kind) {
  std::ostringstream out;
  out << "kind = " << kind << '\n';
  const NetworkConfig& c = spec.base;
  out << "m_t1 = " << c.m_t1 << '\n'
      << "m_t2 = " << c.m_t2 << '\n'
      << "m_pu = " << c.m_pu << '\n'
      << "m_r = " << c.m_r << '\n'
      << "num_relays = " << c.num_relays << '\n'
      << "p_t_peak = " << fmt(c.p_t_peak) << '\n'
      << "p_r_peak = " << fmt(c.p_r_peak) << '\n'
      << "i_th = " << fmt(c.i_th) << '\n'
      << "n0 = " << fmt(c.n0) << '\n';
  if (spec.kind == SweepKind::terminal_power) out << "uniform_w = " << fmt(spec.uniform_w) << '\n';
  out << "trials = " << spec.trials << '\n'
      << "seed = " << spec.seed << '\n'
      << "threads = " << spec.threads << '\n'
      << "solver.step_rule = "
      << (spec.solver.step_rule == SolverOptions::StepRule::polyak ? "polyak" : "diminishing")
      << '\n'
      << "solver.step_scale = " << fmt(spec.solver.step_scale) << '\n'
      << "solver.initial_multiplier = " << fmt(spec.solver.initial_multiplier) << '\n'
      << "solver.max_iterations = " << spec.solver.max_iterations << '\n'
      << "solver.eps_feasibility_scale = " << fmt(spec.solver.eps_feasibility_scale) << '\n'
      << "solver.eps_comp_slackness = " << fmt(spec.solver.eps_comp_slackness) << '\n';
  out << "sweep_values =";
  for (double v : spec.sweep_values) out << ' ' << fmt(v);
  out << '\n';
  return out.str();
}

SweepResult run_sweep(const SweepSpec& spec, const char* kind_name) {
  validate_sweep_values(spec.sweep_values);
  SweepResult result;
  result.metadata = describe(spec, kind_name);
  for (double value : spec.sweep_values) {
    NetworkConfig config = spec.base;
    double w = spec.uniform_w;
    if (spec.kind == SweepKind::terminal_power)
      config.p_t_peak = dbm_to_linear(value);
    else
      w = value;
    TrialStats stats =
        monte_carlo_point(config, w, spec.trials, spec.seed, spec.solver, spec.threads);
    result.rows.push_back({value, stats.mean_rate, stats.std_error, stats.infeasible_trials});
    result.trial_rates.push_back(std::move(stats.trial_rates));
  }
  return result;
}

}  // namespace

std::uint64_t derive_trial_seed(std::uint64_t run_seed, int trial_index) {
  if (trial_index < 1) throw std::invalid_argument("trial_index starts at 1");
  // SplitMix64: the trial seed is the trial_index-th output of the stream
  // seeded with run_seed, so distinct trials get well-separated seeds.
  std::uint64_t z = run_seed + static_cast<std::uint64_t>(trial_index) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

TrialStats monte_carlo_point(const NetworkConfig& config, double uniform_w, int trials,
                             std::uint64_t seed, const SolverOptions& solver, int threads) {
  config.validate();
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!(uniform_w >= 0.0)) throw std::invalid_argument("uniform_w must be >= 0");
  threads = std::clamp(threads, 1, trials);

  std::vector<double> rates(trials, 0.0);
  std::vector<unsigned char> infeasible(trials, 0);
  const AmplificationProfile amp =
      AmplificationProfile::uniform(uniform_w, config.num_relays, config.m_r);

  const auto run_range = [&](int begin, int end) {
    for (int t = begin; t < end; ++t) {
      const ChannelSet channels = generate_rayleigh_channels(config, derive_trial_seed(seed, t + 1));
      const SolveReport report = subgradient_solve(channels, amp, config, solver);
      if (report.status == SolveStatus::infeasible)
        infeasible[t] = 1;
      else
        rates[t] = report.rate;
    }
  };

  if (threads == 1) {
    run_range(0, trials);
  } else {
    // Trials are written by index, so the split has no effect on the result.
    std::vector<std::thread> pool;
    const int chunk = (trials + threads - 1) / threads;
    for (int begin = 0; begin < trials; begin += chunk)
      pool.emplace_back(run_range, begin, std::min(begin + chunk, trials));
    for (auto& worker : pool) worker.join();
  }

  TrialStats stats;
  double sum = 0.0;
  for (double r : rates) sum += r;
  stats.mean_rate = sum / trials;
  double ss = 0.0;
  for (double r : rates) ss += (r - stats.mean_rate) * (r - stats.mean_rate);
  stats.std_error = trials > 1 ? std::sqrt(ss / (trials - 1)) / std::sqrt(double(trials)) : 0.0;
  for (unsigned char flag : infeasible) stats.infeasible_trials += flag;
  stats.trial_rates = std::move(rates);
  return stats;
}

SweepResult sweep_terminal_power(const SweepSpec& spec) {
  if (spec.kind != SweepKind::terminal_power)
    throw std::invalid_argument("spec.kind must be terminal_power");
  return run_sweep(spec, "terminal-power");
}

SweepResult sweep_amplification(const SweepSpec& spec) {
  if (spec.kind != SweepKind::amplification)
    throw std::invalid_argument("spec.kind must be amplification");
  if (!spec.sweep_values.empty() && spec.sweep_values.front() < 0.0)
    throw std::invalid_argument("amplification factors must be >= 0");
  return run_sweep(spec, "amplification");
}

double sweep_argmax_value(const SweepResult& result) {
  if (result.rows.empty()) throw std::invalid_argument("empty sweep");
  std::size_t best = 0;
  for (std::size_t i = 1; i < result.rows.size(); ++i)
    if (result.rows[i].mean_rate > result.rows[best].mean_rate) best = i;
  return result.rows[best].sweep_value;
}

std::string to_csv(const SweepResult& result) {
  std::string out = "sweep_value,mean_rate_bps_hz,stderr,infeasible_trials\n";
  char buf[160];
  for (const SweepRow& row : result.rows) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%d\n", row.sweep_value, row.mean_rate,
                  row.std_error, row.infeasible_trials);
    out += buf;
  }
  return out;
}

std::string trials_to_csv(const SweepResult& result) {
  std::string out = "sweep_value,trial_index,rate_bps_hz\n";
  char buf[160];
  for (std::size_t i = 0; i < result.rows.size(); ++i)
    for (std::size_t t = 0; t < result.trial_rates[i].size(); ++t) {
      std::snprintf(buf, sizeof buf, "%.12g,%zu,%.12g\n", result.rows[i].sweep_value, t + 1,
                    result.trial_rates[i][t]);
      out += buf;
    }
  return out;
}

}  // namespace twrcr
