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

#include "twrcr/channel.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace twrcr {

namespace {

// One unit-variance circularly-symmetric complex Gaussian draw via Box-Muller.
// u1 is bumped into (0, 1] so the log never sees zero; the generator sequence
// itself is standard-specified, so realizations are bit-identical per seed.
Complex draw_unit_cn(std::mt19937_64& rng) {
  const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
  const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;          // [0, 1)
  const double radius = std::sqrt(-std::log(u1));  // E[radius^2] = 1
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

CMatrix draw_matrix(std::mt19937_64& rng, int rows, int cols) {
  CMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = draw_unit_cn(rng);
  return m;
}

}  // namespace

AmplificationProfile AmplificationProfile::uniform(double gain, int num_relays, int m_r) {
  if (gain < 0.0 || !std::isfinite(gain)) throw std::invalid_argument("gain must be finite and >= 0");
  AmplificationProfile amp;
  amp.w.assign(static_cast<std::size_t>(num_relays), RVector::Constant(m_r, gain));
  return amp;
}

ChannelSet generate_rayleigh_channels(const NetworkConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  ChannelSet ch;
  const int l = config.num_relays;
  ch.h_1r.reserve(l);
  ch.h_2r.reserve(l);
  ch.h_rp.reserve(l);
  for (int i = 0; i < l; ++i) ch.h_1r.push_back(draw_matrix(rng, config.m_r, config.m_t1));
  for (int i = 0; i < l; ++i) ch.h_2r.push_back(draw_matrix(rng, config.m_r, config.m_t2));
  for (int i = 0; i < l; ++i) ch.h_rp.push_back(draw_matrix(rng, config.m_r, config.m_pu));
  ch.h_1p = draw_matrix(rng, config.m_t1, config.m_pu);
  ch.h_2p = draw_matrix(rng, config.m_t2, config.m_pu);
  return ch;
}

AmplificationProfile amplification_from_relay_power(const std::vector<RVector>& relay_powers,
                                                    const RVector& p1, const RVector& p2,
                                                    const ChannelSet& channels, double n0) {
  const std::size_t l = channels.h_1r.size();
  if (relay_powers.size() != l) throw std::invalid_argument("relay_powers: wrong relay count");
  if (!(n0 > 0.0)) throw std::invalid_argument("n0 must be > 0");
  if ((p1.size() && p1.minCoeff() < 0.0) || (p2.size() && p2.minCoeff() < 0.0))
    throw std::invalid_argument("terminal powers must be >= 0");

  AmplificationProfile amp;
  amp.w.reserve(l);
  for (std::size_t i = 0; i < l; ++i) {
    if (channels.h_1r[i].cols() != p1.size() || channels.h_2r[i].cols() != p2.size())
      throw std::invalid_argument("power vector lengths do not match channel columns");
    if (relay_powers[i].size() != channels.h_1r[i].rows())
      throw std::invalid_argument("relay_powers: wrong antenna count");
    if (relay_powers[i].minCoeff() < 0.0)
      throw std::invalid_argument("relay powers must be >= 0");
    // Received power per relay antenna: sum_z P1^z |h_1ri^kz|^2 + sum_z P2^z |h_2ri^kz|^2 + n0.
    RVector denom = channels.h_1r[i].cwiseAbs2() * p1 + channels.h_2r[i].cwiseAbs2() * p2;
    denom.array() += n0;
    amp.w.push_back((relay_powers[i].array() / denom.array()).sqrt().matrix());
  }
  return amp;
}

}  // namespace twrcr
