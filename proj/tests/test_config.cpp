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

#include <stdexcept>

#include "twrcr/config.hpp"

namespace {

twrcr::NetworkConfig valid_config() {
  twrcr::NetworkConfig config;
  config.m_t1 = 2;
  config.m_t2 = 3;
  config.m_pu = 1;
  config.m_r = 2;
  config.num_relays = 4;
  config.p_t_peak = 100.0;
  config.p_r_peak = 10.0;
  config.i_th = 100.0;
  config.n0 = 0.1;
  return config;
}

}  // namespace

TEST_CASE("valid config passes validation") {
  CHECK_NOTHROW(valid_config().validate());
}

TEST_CASE("m_min is the smaller terminal antenna count") {
  twrcr::NetworkConfig config = valid_config();
  CHECK(config.m_min() == 2);
  config.m_t1 = 5;
  CHECK(config.m_min() == 3);
}

TEST_CASE("non-positive dimensions are rejected") {
  for (int twrcr::NetworkConfig::* field :
       {&twrcr::NetworkConfig::m_t1, &twrcr::NetworkConfig::m_t2, &twrcr::NetworkConfig::m_pu,
        &twrcr::NetworkConfig::m_r, &twrcr::NetworkConfig::num_relays}) {
    twrcr::NetworkConfig config = valid_config();
    config.*field = 0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config.*field = -1;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  }
}

TEST_CASE("negative budgets and non-positive noise are rejected") {
  for (double twrcr::NetworkConfig::* field :
       {&twrcr::NetworkConfig::p_t_peak, &twrcr::NetworkConfig::p_r_peak,
        &twrcr::NetworkConfig::i_th}) {
    twrcr::NetworkConfig config = valid_config();
    config.*field = -1e-9;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  }
  twrcr::NetworkConfig config = valid_config();
  config.n0 = 0.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("dbm conversion hits the reference points") {
  CHECK(twrcr::dbm_to_linear(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(twrcr::dbm_to_linear(20.0) == doctest::Approx(100.0).epsilon(1e-15));
  CHECK(twrcr::dbm_to_linear(10.0) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(twrcr::dbm_to_linear(-10.0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(twrcr::dbm_to_linear(3.0) == doctest::Approx(1.9952623149688795).epsilon(1e-15));
}
