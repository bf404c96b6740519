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

#include "twrcr/effective_link.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace twrcr {

EffectiveChannel compute_effective_channels(const ChannelSet& channels,
                                            const AmplificationProfile& amp, double n0) {
  const std::size_t l = channels.h_1r.size();
  if (channels.h_2r.size() != l || amp.w.size() != l)
    throw std::invalid_argument("channel/amplification relay counts disagree");
  if (l == 0) throw std::invalid_argument("at least one relay required");
  if (!(n0 > 0.0)) throw std::invalid_argument("n0 must be > 0");

  const Eigen::Index m_t1 = channels.h_1r[0].cols();
  const Eigen::Index m_t2 = channels.h_2r[0].cols();

  EffectiveChannel eff;
  eff.a1 = CMatrix::Zero(m_t2, m_t1);
  eff.a2 = CMatrix::Zero(m_t1, m_t2);
  double noise_gain_1 = 0.0;  // sum_i sum_v sum_k |w_i^k h_1ri^kv|^2
  double noise_gain_2 = 0.0;
  for (std::size_t i = 0; i < l; ++i) {
    const CMatrix& h1 = channels.h_1r[i];
    const CMatrix& h2 = channels.h_2r[i];
    const RVector& w = amp.w[i];
    if (h1.cols() != m_t1 || h2.cols() != m_t2 || h1.rows() != h2.rows() || w.size() != h1.rows())
      throw std::invalid_argument("channel/amplification shapes disagree");
    if (w.size() && w.minCoeff() < 0.0) throw std::invalid_argument("amplification factors must be >= 0");
    eff.a1.noalias() += h2.transpose() * w.asDiagonal() * h1;
    eff.a2.noalias() += h1.transpose() * w.asDiagonal() * h2;
    const RVector w_sq = w.array().square().matrix();
    noise_gain_1 += w_sq.dot(h1.cwiseAbs2().rowwise().sum());
    noise_gain_2 += w_sq.dot(h2.cwiseAbs2().rowwise().sum());
  }
  eff.n1 = n0 * (1.0 + noise_gain_1);
  eff.n2 = n0 * (1.0 + noise_gain_2);
  eff.m_min = static_cast<int>(std::min(m_t1, m_t2));

  // Eigen returns singular values in descending order already.
  eff.sigma1 = Eigen::JacobiSVD<CMatrix>(eff.a1).singularValues().head(eff.m_min);
  eff.sigma2 = Eigen::JacobiSVD<CMatrix>(eff.a2).singularValues().head(eff.m_min);
  return eff;
}

double sum_rate(const RVector& p1, const RVector& p2, const EffectiveChannel& eff) {
  if (p1.size() < eff.m_min || p2.size() < eff.m_min)
    throw std::invalid_argument("power vectors shorter than m_min");
  if ((p1.size() && p1.minCoeff() < 0.0) || (p2.size() && p2.minCoeff() < 0.0))
    throw std::domain_error("negative transmit power");

  constexpr double inv_ln2 = 1.4426950408889634;
  double rate = 0.0;
  for (int q = 0; q < eff.m_min; ++q) {
    rate += 0.5 * std::log1p(eff.sigma2[q] * eff.sigma2[q] * p2[q] / eff.n2) * inv_ln2;
    rate += 0.5 * std::log1p(eff.sigma1[q] * eff.sigma1[q] * p1[q] / eff.n1) * inv_ln2;
  }
  return rate;
}

}  // namespace twrcr
