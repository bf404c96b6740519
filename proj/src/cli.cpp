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

#include "twrcr/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "twrcr/experiments.hpp"
#include "twrcr/oracle.hpp"

namespace twrcr::cli {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::string fmt(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string fmt(const RVector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += fmt(v[i]);
  }
  return out;
}

double parse_double(const std::string& text, const std::string& what) {
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error(what + ": expected a number, got '" + text + "'");
  }
  if (pos != text.size())
    throw std::runtime_error(what + ": trailing characters in '" + text + "'");
  return value;
}

int parse_int(const std::string& text, const std::string& what) {
  std::size_t pos = 0;
  long value = 0;
  try {
    value = std::stol(text, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error(what + ": expected an integer, got '" + text + "'");
  }
  if (pos != text.size() || value < std::numeric_limits<int>::min() ||
      value > std::numeric_limits<int>::max())
    throw std::runtime_error(what + ": not a valid integer: '" + text + "'");
  return static_cast<int>(value);
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "m_t1",          "m_t2",
      "m_pu",          "m_r",
      "num_relays",    "p_t_peak_dbm",
      "p_r_peak_dbm",  "i_th_dbm",
      "n0_dbm",        "w",
      "trials",        "threads",
      "sweep_values",  "solver.step_rule",
      "solver.step_scale", "solver.initial_multiplier",
      "solver.max_iterations", "solver.eps_feasibility_scale",
      "solver.eps_comp_slackness",
  };
  return keys;
}

// Typed view over the merged config-file and --set pairs. Unknown keys are
// rejected up front so typos do not silently fall back to defaults.
class Settings {
 public:
  explicit Settings(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {
    for (const auto& [key, value] : kv_)
      if (!known_keys().count(key)) throw std::runtime_error("unknown config key: " + key);
  }

  int get_int(const std::string& key, int fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : parse_int(it->second, key);
  }
  double get_double(const std::string& key, double fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : parse_double(it->second, key);
  }
  std::string get_string(const std::string& key, std::string fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? std::move(fallback) : it->second;
  }
  std::vector<double> get_doubles(const std::string& key,
                                  const std::vector<double>& fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::string text = it->second;
    std::replace(text.begin(), text.end(), ',', ' ');
    std::istringstream stream(text);
    std::vector<double> values;
    std::string token;
    while (stream >> token) values.push_back(parse_double(token, key));
    return values;
  }

 private:
  std::map<std::string, std::string> kv_;
};

NetworkConfig network_config(const Settings& s) {
  NetworkConfig c;
  c.m_t1 = s.get_int("m_t1", 2);
  c.m_t2 = s.get_int("m_t2", 2);
  c.m_pu = s.get_int("m_pu", 2);
  c.m_r = s.get_int("m_r", 2);
  c.num_relays = s.get_int("num_relays", 4);
  c.p_t_peak = dbm_to_linear(s.get_double("p_t_peak_dbm", 20.0));
  c.p_r_peak = dbm_to_linear(s.get_double("p_r_peak_dbm", 10.0));
  c.i_th = dbm_to_linear(s.get_double("i_th_dbm", 20.0));
  c.n0 = dbm_to_linear(s.get_double("n0_dbm", -10.0));
  c.validate();
  return c;
}

SolverOptions solver_options(const Settings& s) {
  SolverOptions o;
  const std::string rule = s.get_string("solver.step_rule", "polyak");
  if (rule == "polyak")
    o.step_rule = SolverOptions::StepRule::polyak;
  else if (rule == "diminishing")
    o.step_rule = SolverOptions::StepRule::diminishing;
  else
    throw std::runtime_error("solver.step_rule must be 'polyak' or 'diminishing'");
  o.step_scale = s.get_double("solver.step_scale", o.step_scale);
  o.initial_multiplier = s.get_double("solver.initial_multiplier", o.initial_multiplier);
  o.max_iterations = s.get_int("solver.max_iterations", o.max_iterations);
  o.eps_feasibility_scale = s.get_double("solver.eps_feasibility_scale", o.eps_feasibility_scale);
  o.eps_comp_slackness = s.get_double("solver.eps_comp_slackness", o.eps_comp_slackness);
  if (!(o.step_scale > 0.0) || !(o.initial_multiplier >= 0.0) || o.max_iterations < 1 ||
      !(o.eps_feasibility_scale >= 0.0) || !(o.eps_comp_slackness >= 0.0))
    throw std::runtime_error("solver options out of range");
  return o;
}

double shared_gain(const Settings& s) {
  const double w = s.get_double("w", 0.2);
  if (!(w >= 0.0) || !std::isfinite(w)) throw std::runtime_error("w must be finite and >= 0");
  return w;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open for writing: " + path);
  file << text;
  if (!file) throw std::runtime_error("write failed: " + path);
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty())
    out << text;
  else
    write_text(out_path, text);
}

void emit_commented(const std::string& text, std::ostream& err) {
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) err << "# " << line << '\n';
}

int run_solve(const Settings& s, std::uint64_t seed, const std::string& out_path,
              std::ostream& out) {
  const NetworkConfig config = network_config(s);
  const SolverOptions options = solver_options(s);
  const double w = shared_gain(s);
  const ChannelSet channels = generate_rayleigh_channels(config, seed);
  const AmplificationProfile amp =
      AmplificationProfile::uniform(w, config.num_relays, config.m_r);
  const SolveReport report = subgradient_solve(channels, amp, config, options);

  std::ostringstream text;
  text << "status = " << to_string(report.status) << '\n'
       << "rate_bps_hz = " << fmt(report.rate) << '\n'
       << "iterations = " << report.iterations << '\n'
       << "max_constraint_violation = " << fmt(report.max_constraint_violation) << '\n'
       << "duality_gap_estimate = " << fmt(report.duality_gap_estimate) << '\n'
       << "p1 = " << fmt(report.allocation.p1) << '\n'
       << "p2 = " << fmt(report.allocation.p2) << '\n'
       << "lambda1 = " << fmt(report.duals.lambda1) << '\n'
       << "lambda2 = " << fmt(report.duals.lambda2) << '\n'
       << "lambda_r = " << fmt(report.duals.lambda_r) << '\n'
       << "lambda_th1 = " << fmt(report.duals.lambda_th1) << '\n'
       << "lambda_th2 = " << fmt(report.duals.lambda_th2) << '\n';
  if (report.status != SolveStatus::infeasible) {
    const EffectiveChannel eff = compute_effective_channels(channels, amp, config.n0);
    const KktResiduals kkt = kkt_residuals(report, channels, amp, config, eff);
    text << "kkt.primal_violation = " << fmt(kkt.primal_violation) << '\n'
         << "kkt.comp_slackness = " << fmt(kkt.comp_slackness) << '\n'
         << "kkt.stationarity = " << fmt(kkt.stationarity) << '\n';
  }
  emit(text.str(), out_path, out);

  switch (report.status) {
    case SolveStatus::converged:
      return kExitOk;
    case SolveStatus::infeasible:
      return kExitInfeasible;
    case SolveStatus::iteration_limit:
      return kExitNoConvergence;
  }
  return kExitNoConvergence;
}

int run_sweep(SweepKind kind, const Settings& s, std::uint64_t seed, const std::string& out_path,
              const std::string& dump_path, std::ostream& out, std::ostream& err) {
  SweepSpec spec;
  spec.kind = kind;
  spec.base = network_config(s);
  spec.uniform_w = shared_gain(s);
  spec.trials = s.get_int("trials", 500);
  spec.seed = seed;
  spec.solver = solver_options(s);
  spec.threads = s.get_int("threads", 1);
  if (spec.threads < 1) throw std::runtime_error("threads must be >= 1");

  std::vector<double> fallback;
  if (kind == SweepKind::terminal_power)
    for (int dbm = 0; dbm <= 40; dbm += 5) fallback.push_back(dbm);
  else
    for (int i = 1; i <= 12; ++i) fallback.push_back(0.05 * i);
  spec.sweep_values = s.get_doubles("sweep_values", fallback);

  const SweepResult result = kind == SweepKind::terminal_power ? sweep_terminal_power(spec)
                                                               : sweep_amplification(spec);
  emit_commented(result.metadata, err);
  if (kind == SweepKind::amplification)
    err << "# argmax_w = " << fmt(sweep_argmax_value(result)) << '\n';
  emit(to_csv(result), out_path, out);
  if (!dump_path.empty()) write_text(dump_path, trials_to_csv(result));
  return kExitOk;
}

int run_oracle_compare(std::uint64_t seed, int instances, std::ostream& out) {
  // Small-instance family sized for the exhaustive reference solver; the
  // shared gain is drawn per instance from [0.05, 0.5].
  NetworkConfig config;
  config.m_t1 = config.m_t2 = config.m_pu = config.m_r = 2;
  config.p_t_peak = dbm_to_linear(20.0);
  config.p_r_peak = dbm_to_linear(10.0);
  config.i_th = dbm_to_linear(10.0);
  config.n0 = dbm_to_linear(-10.0);

  int solved = 0, skipped = 0, not_converged = 0;
  double max_gap = 0.0, gap_sum = 0.0;
  for (int t = 1; t <= instances; ++t) {
    config.num_relays = 1 + (t % 2);
    const std::uint64_t trial_seed = derive_trial_seed(seed, t);
    const double u =
        static_cast<double>(derive_trial_seed(seed ^ 0xA5A5A5A5A5A5A5A5ULL, t) >> 11) * 0x1.0p-53;
    const AmplificationProfile amp =
        AmplificationProfile::uniform(0.05 + 0.45 * u, config.num_relays, config.m_r);
    const ChannelSet channels = generate_rayleigh_channels(config, trial_seed);
    if (!check_structural_feasibility(channels, amp, config)) {
      ++skipped;
      continue;
    }
    const SolveReport report = subgradient_solve(channels, amp, config);
    if (report.status != SolveStatus::converged) ++not_converged;
    const PowerAllocation reference = projected_gradient_solve(channels, amp, config);
    const EffectiveChannel eff = compute_effective_channels(channels, amp, config.n0);
    const double reference_rate = sum_rate(reference.p1, reference.p2, eff);
    const double gap = std::abs(report.rate - reference_rate) /
                       std::max(std::max(report.rate, reference_rate), 1e-9);
    max_gap = std::max(max_gap, gap);
    gap_sum += gap;
    ++solved;
  }

  out << "instances = " << instances << '\n'
      << "solved = " << solved << '\n'
      << "skipped_infeasible = " << skipped << '\n'
      << "not_converged = " << not_converged << '\n'
      << "max_relative_gap = " << fmt(max_gap) << '\n'
      << "mean_relative_gap = " << fmt(solved ? gap_sum / solved : 0.0) << '\n';
  return not_converged == 0 ? kExitOk : kExitNoConvergence;
}

int run_selftest(std::uint64_t seed, std::ostream& out) {
  bool all_ok = true;
  const auto check = [&](const char* name, bool ok) {
    out << (ok ? "[PASS] " : "[FAIL] ") << name << '\n';
    all_ok = all_ok && ok;
  };

  NetworkConfig config;
  config.m_t1 = config.m_t2 = config.m_pu = config.m_r = 2;
  config.num_relays = 2;
  config.p_t_peak = dbm_to_linear(20.0);
  config.p_r_peak = dbm_to_linear(10.0);
  config.i_th = dbm_to_linear(10.0);
  config.n0 = 0.1;
  const ChannelSet channels = generate_rayleigh_channels(config, seed);
  const AmplificationProfile amp = AmplificationProfile::uniform(0.2, 2, 2);
  const EffectiveChannel eff = compute_effective_channels(channels, amp, config.n0);

  {
    const RVector p1 = RVector::Constant(2, 3.0), p2 = RVector::Constant(2, 1.5);
    const std::vector<RVector> targets(2, RVector::Constant(2, 0.7));
    const AmplificationProfile solved =
        amplification_from_relay_power(targets, p1, p2, channels, config.n0);
    double worst = 0.0;
    for (int i = 0; i < 2; ++i) {
      RVector received = channels.h_1r[i].cwiseAbs2() * p1 + channels.h_2r[i].cwiseAbs2() * p2;
      received.array() += config.n0;
      const RVector output = solved.w[i].array().square() * received.array();
      worst = std::max(worst, (output - targets[i]).cwiseAbs().maxCoeff());
    }
    check("relay gain round-trip reproduces requested output powers", worst <= 1e-12);
  }
  check("effective noise floors stay above n0", eff.n1 >= config.n0 && eff.n2 >= config.n0);
  check("forward/backward effective channels share singular values",
        (eff.sigma1 - eff.sigma2).cwiseAbs().maxCoeff() <= 1e-10);
  {
    const RVector p1 = RVector::Constant(2, 5.0), p2 = RVector::Constant(2, 5.0);
    RVector p1_up = p1;
    p1_up[0] += 1.0;
    check("sum rate is non-decreasing in every power",
          sum_rate(p1_up, p2, eff) >= sum_rate(p1, p2, eff));
  }
  {
    DualVariables a, b;
    a.lambda1 = 0.02; a.lambda2 = 0.01; a.lambda_r = RVector::Constant(2, 0.005);
    a.lambda_th1 = 0.01; a.lambda_th2 = 0.002;
    b.lambda1 = 0.05; b.lambda2 = 0.04; b.lambda_r = RVector::Constant(2, 0.001);
    b.lambda_th1 = 0.03; b.lambda_th2 = 0.004;
    DualVariables mid;
    mid.lambda1 = 0.5 * (a.lambda1 + b.lambda1);
    mid.lambda2 = 0.5 * (a.lambda2 + b.lambda2);
    mid.lambda_r = 0.5 * (a.lambda_r + b.lambda_r);
    mid.lambda_th1 = 0.5 * (a.lambda_th1 + b.lambda_th1);
    mid.lambda_th2 = 0.5 * (a.lambda_th2 + b.lambda_th2);
    const auto dual_value = [&](const DualVariables& duals) {
      const PowerAllocation p = closed_form_power(duals, eff, channels, amp, config);
      return lagrangian_value(duals, p, eff, channels, amp, config);
    };
    check("dual function midpoint stays under the chord",
          dual_value(mid) <= 0.5 * (dual_value(a) + dual_value(b)) + 1e-9);
  }
  {
    DualVariables lo;
    lo.lambda1 = lo.lambda2 = 0.01;
    lo.lambda_r = RVector::Constant(2, 0.001);
    lo.lambda_th1 = lo.lambda_th2 = 0.001;
    DualVariables hi = lo;
    hi.lambda_th1 = 0.01;
    const PowerAllocation p_lo = closed_form_power(lo, eff, channels, amp, config);
    const PowerAllocation p_hi = closed_form_power(hi, eff, channels, amp, config);
    check("closed-form powers never grow when a multiplier grows",
          (p_hi.p1 - p_lo.p1).maxCoeff() <= 0.0 && (p_hi.p2 - p_lo.p2).maxCoeff() <= 0.0);
  }
  {
    SweepSpec spec;
    spec.kind = SweepKind::amplification;
    spec.base = config;
    spec.sweep_values = {0.1, 0.2};
    spec.trials = 3;
    spec.seed = seed;
    check("sweep CSV is byte-deterministic",
          to_csv(sweep_amplification(spec)) == to_csv(sweep_amplification(spec)));
  }
  return all_ok ? kExitOk : 1;
}

}  // namespace

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(file, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(text.substr(0, eq));
    if (key.empty())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key");
    kv[key] = trim(text.substr(eq + 1));  // last occurrence wins
  }
  return kv;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Terminal power allocation experiments for two-way relay networks"};
  app.require_subcommand(1);

  std::string config_path, out_path, dump_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  int instances = 50;

  app.add_option("--config", config_path, "key = value settings file");
  app.add_option("--seed", seed, "run seed, fixes every random draw")->required();
  app.add_option("--set", overrides, "override a config key, KEY=VALUE (repeatable)");
  app.add_option("--out", out_path, "write the result here instead of stdout");

  CLI::App* solve_cmd =
      app.add_subcommand("solve", "solve one seeded instance and print the report");
  CLI::App* sweep_power_cmd = app.add_subcommand(
      "sweep-power", "Monte Carlo sweep over terminal peak power (dBm), CSV output");
  CLI::App* sweep_amp_cmd = app.add_subcommand(
      "sweep-amp", "Monte Carlo sweep over the shared amplification factor, CSV output");
  CLI::App* oracle_cmd = app.add_subcommand(
      "oracle-compare", "cross-check the solver against the reference solver");
  CLI::App* selftest_cmd = app.add_subcommand("selftest", "run the built-in invariant suite");
  for (CLI::App* sub : {solve_cmd, sweep_power_cmd, sweep_amp_cmd, oracle_cmd, selftest_cmd})
    sub->fallthrough();
  sweep_power_cmd->add_option("--dump-trials", dump_path, "write per-trial rates to this file");
  sweep_amp_cmd->add_option("--dump-trials", dump_path, "write per-trial rates to this file");
  oracle_cmd->add_option("--instances", instances, "random instances to compare")
      ->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    std::map<std::string, std::string> kv;
    if (!config_path.empty()) kv = parse_config_file(config_path);
    for (const std::string& item : overrides) {
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("--set expects KEY=VALUE, got '" + item + "'");
      kv[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
    }
    const Settings settings(std::move(kv));

    if (solve_cmd->parsed()) return run_solve(settings, seed, out_path, out);
    if (sweep_power_cmd->parsed())
      return run_sweep(SweepKind::terminal_power, settings, seed, out_path, dump_path, out, err);
    if (sweep_amp_cmd->parsed())
      return run_sweep(SweepKind::amplification, settings, seed, out_path, dump_path, out, err);
    if (oracle_cmd->parsed()) return run_oracle_compare(seed, instances, out);
    if (selftest_cmd->parsed()) return run_selftest(seed, out);
    err << "error: no subcommand selected\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

}  // namespace twrcr::cli
