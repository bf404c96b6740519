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

#include "twrcr/config.hpp"

#include <stdexcept>
#include <string>

namespace twrcr {

void NetworkConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("NetworkConfig: " + what); };
  if (m_t1 < 1 || m_t2 < 1 || m_pu < 1 || m_r < 1) fail("antenna counts must be >= 1");
  if (num_relays < 1) fail("num_relays must be >= 1");
  if (!(p_t_peak >= 0.0) || !std::isfinite(p_t_peak)) fail("p_t_peak must be finite and >= 0");
  if (!(p_r_peak >= 0.0) || !std::isfinite(p_r_peak)) fail("p_r_peak must be finite and >= 0");
  if (!(i_th >= 0.0) || !std::isfinite(i_th)) fail("i_th must be finite and >= 0");
  if (!(n0 > 0.0) || !std::isfinite(n0)) fail("n0 must be finite and > 0");
}

}  // namespace twrcr
