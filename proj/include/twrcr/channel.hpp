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

#ifndef TWRCR_CHANNEL_HPP
#define TWRCR_CHANNEL_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "twrcr/config.hpp"

namespace twrcr {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// One fading realization of the five channel families. The entry (x, y) of a
/// terminal-to-relay matrix is the coefficient from transmit antenna y at the
/// terminal to receive antenna x at the relay; the PU matrices are stored with
/// the secondary node's antennas as rows.
struct ChannelSet {
  std::vector<CMatrix> h_1r;  ///< L matrices, each m_r x m_t1
  std::vector<CMatrix> h_2r;  ///< L matrices, each m_r x m_t2
  std::vector<CMatrix> h_rp;  ///< L matrices, each m_r x m_pu
  CMatrix h_1p;               ///< m_t1 x m_pu
  CMatrix h_2p;               ///< m_t2 x m_pu
};

/// Per-antenna relay gains; w[i][k] is the factor applied at antenna k of
/// relay i (the diagonal of W_i). All entries non-negative.
struct AmplificationProfile {
  std::vector<RVector> w;

  /// Every relay antenna set to the same gain.
  static AmplificationProfile uniform(double gain, int num_relays, int m_r);
};

/// Draws every entry i.i.d. circularly-symmetric complex Gaussian with zero
/// mean and unit variance, so |h| is Rayleigh with E|h|^2 = 1. Fully
/// deterministic in (config, seed): matrices are filled from a single
/// mt19937_64 stream in the order h_1r[0..L), h_2r[0..L), h_rp[0..L), h_1p,
/// h_2p, row-major within each matrix, one Box-Muller pair per entry.
ChannelSet generate_rayleigh_channels(const NetworkConfig& config, std::uint64_t seed);

/// Gains realizing the requested per-antenna relay output powers:
/// w_i^k = sqrt(P_ri^k / (sum_z P1^z |h_1ri^kz|^2 + sum_z P2^z |h_2ri^kz|^2 + n0)).
/// With the returned profile the relay output power at antenna k of relay i
/// equals relay_powers[i][k] exactly.
AmplificationProfile amplification_from_relay_power(const std::vector<RVector>& relay_powers,
                                                    const RVector& p1, const RVector& p2,
                                                    const ChannelSet& channels, double n0);

}  // namespace twrcr

#endif  // TWRCR_CHANNEL_HPP
