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

#ifndef TWRCR_CONFIG_HPP
#define TWRCR_CONFIG_HPP

#include <algorithm>
#include <cmath>

namespace twrcr {

/// Scalar system parameters of one network instance. All power-like fields
/// (p_t_peak, p_r_peak, i_th, n0) live on a single linear scale; use
/// dbm_to_linear to convert budgets quoted in dBm.
struct NetworkConfig {
  int m_t1 = 1;        ///< antennas at terminal T1
  int m_t2 = 1;        ///< antennas at terminal T2
  int m_pu = 1;        ///< antennas at the primary user
  int m_r = 1;         ///< antennas per relay (uniform across relays)
  int num_relays = 1;  ///< L
  double p_t_peak = 0.0;  ///< terminal peak power, linear
  double p_r_peak = 0.0;  ///< relay peak power, linear
  double i_th = 0.0;      ///< primary-user interference threshold, linear
  double n0 = 1e-4;       ///< noise variance, linear

  int m_min() const { return std::min(m_t1, m_t2); }

  /// Throws std::invalid_argument if any field is out of range.
  void validate() const;
};

/// 10^(p_dbm/10), i.e. dBm to a milliwatt-referenced linear value.
inline double dbm_to_linear(double p_dbm) { return std::pow(10.0, p_dbm / 10.0); }

}  // namespace twrcr

#endif  // TWRCR_CONFIG_HPP
