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

#ifndef TWRCR_EXPERIMENTS_HPP
#define TWRCR_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "twrcr/optimizer.hpp"

namespace twrcr {

enum class SweepKind { terminal_power, amplification };

/// One seeded Monte Carlo sweep. For terminal_power the sweep values are
/// peak terminal powers in dBm and uniform_w fixes the shared relay gain;
/// for amplification the sweep values are the shared gain itself.
struct SweepSpec {
  SweepKind kind = SweepKind::amplification;
  NetworkConfig base;  ///< linear scale; p_t_peak is overridden per point in terminal_power sweeps
  std::vector<double> sweep_values;  ///< non-empty, strictly increasing
  double uniform_w = 0.2;
  int trials = 500;
  std::uint64_t seed = 1;
  SolverOptions solver;
  int threads = 1;  ///< trial-level parallelism; aggregation stays deterministic
};

struct SweepRow {
  double sweep_value = 0.0;
  double mean_rate = 0.0;  ///< bits/s/Hz, infeasible trials contribute 0
  double std_error = 0.0;
  int infeasible_trials = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::vector<double>> trial_rates;  ///< per row, in trial order
  std::string metadata;  ///< resolved config and seed, human-readable
};

struct TrialStats {
  double mean_rate = 0.0;
  double std_error = 0.0;
  int infeasible_trials = 0;
  std::vector<double> trial_rates;
};

/// The t-th output (t >= 1) of the SplitMix64 generator seeded with run_seed.
/// Sweeps at different parameter values share trial seeds, so rows are
/// pairwise comparable trial by trial.
std::uint64_t derive_trial_seed(std::uint64_t run_seed, int trial_index);

/// Draws `trials` channel realizations (seeds derive_trial_seed(seed, t) for
/// t = 1..trials), applies the shared gain uniform_w at every relay antenna,
/// solves each instance, and aggregates. Infeasible trials count rate 0 and
/// are tallied separately. std_error is the sample standard deviation over
/// trials divided by sqrt(trials).
TrialStats monte_carlo_point(const NetworkConfig& config, double uniform_w, int trials,
                             std::uint64_t seed, const SolverOptions& solver = {},
                             int threads = 1);

/// One monte_carlo_point per sweep value with p_t_peak = dbm_to_linear(value).
SweepResult sweep_terminal_power(const SweepSpec& spec);

/// One monte_carlo_point per sweep value with the gain set to the value.
SweepResult sweep_amplification(const SweepSpec& spec);

/// Sweep value of the highest mean rate (first such row on ties).
double sweep_argmax_value(const SweepResult& result);

/// Fixed schema: header "sweep_value,mean_rate_bps_hz,stderr,infeasible_trials",
/// decimal dot, rows in sweep order. Byte-identical for identical inputs.
std::string to_csv(const SweepResult& result);

/// Per-trial records: "sweep_value,trial_index,rate_bps_hz" per line after a
/// header, trial_index starting at 1.
std::string trials_to_csv(const SweepResult& result);

}  // namespace twrcr

#endif  // TWRCR_EXPERIMENTS_HPP
