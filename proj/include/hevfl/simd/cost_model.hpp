/*
 * Copyright 2026 The hevfl Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <string>

#include "hevfl/simd/metering.hpp"

namespace hevfl {

// Abstract time units per basic operation plus ciphertext sizes for byte
// accounting. The default units (1, 2, 30, 10) are a modeling choice; only
// their ordering cost(rot) > cost(hst_rot) > cost(mult) >= cost(add) > 0 is
// relied upon.
struct CostModel {
  double cost_add = 1.0;
  double cost_mult = 2.0;
  double cost_rot = 30.0;
  double cost_hst_rot = 10.0;
  std::uint64_t ring_degree = 8192;
  int log_q = 122;
  std::uint64_t plain_modulus = 1099511627689ULL;
  std::uint64_t delta = 1ULL << 10;

  // Throws ConfigInvalid unless the ordering constraint holds.
  void validate() const;

  std::uint64_t rlwe_ct_bytes() const;
  std::uint64_t lwe_ct_bytes() const;
  double cost(const OpCounter& ops) const;

  // Parses a JSON object with keys cost_add, cost_mult, cost_rot,
  // cost_hst_rot, N, log_q, t, delta; missing keys keep their defaults.
  static CostModel parse(const std::string& text);
  static CostModel load(const std::string& path);
};

}  // namespace hevfl
