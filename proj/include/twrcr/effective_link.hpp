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

#ifndef TWRCR_EFFECTIVE_LINK_HPP
#define TWRCR_EFFECTIVE_LINK_HPP

#include "twrcr/channel.hpp"

namespace twrcr {

/// End-to-end two-way relayed channel after self-interference cancellation:
/// the effective matrices, their singular values, and the aggregate noise
/// power at each terminal (thermal plus relay-forwarded noise).
struct EffectiveChannel {
  CMatrix a1;      ///< sum_i H_2ri^T W_i H_1ri, m_t2 x m_t1 (T1 -> T2 direction)
  CMatrix a2;      ///< sum_i H_1ri^T W_i H_2ri, m_t1 x m_t2 (T2 -> T1 direction)
  RVector sigma1;  ///< singular values of a1, descending, length m_min
  RVector sigma2;  ///< singular values of a2, descending, length m_min
  double n1 = 0.0;  ///< effective noise power paired with the P1/sigma1 rate sum
  double n2 = 0.0;  ///< effective noise power paired with the P2/sigma2 rate sum
  int m_min = 0;    ///< min(m_t1, m_t2)
};

/// Assembles the effective matrices with W_i = diag(amp.w[i]), takes their
/// SVDs, and evaluates the effective noise powers
///   n1 = n0 (1 + sum_i sum_v sum_k |w_i^k h_1ri^kv|^2),
///   n2 = n0 (1 + sum_i sum_u sum_k |w_i^k h_2ri^ku|^2).
/// Throws std::invalid_argument on shape mismatch between channels and amp.
EffectiveChannel compute_effective_channels(const ChannelSet& channels,
                                            const AmplificationProfile& amp, double n0);

/// Sum rate over the eigen-channels, bits/s/Hz:
///   R = 1/2 sum_u log2(1 + sigma2_u^2 p2_u / n2)
///     + 1/2 sum_v log2(1 + sigma1_v^2 p1_v / n1),
/// both sums over the first m_min entries; the q-th power pairs with the q-th
/// largest singular value. Throws std::domain_error on negative powers.
double sum_rate(const RVector& p1, const RVector& p2, const EffectiveChannel& eff);

}  // namespace twrcr

#endif  // TWRCR_EFFECTIVE_LINK_HPP
