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

#include <string>
#include <vector>

#include "hevfl/simd/cost_model.hpp"
#include "hevfl/simd/params.hpp"

namespace hevfl {

// Named parameter regimes. paper-122 / paper-156 model N = 8192 with one or
// two multiplication levels; desk-1024 is the live lattice configuration.
struct Preset {
  std::string name;
  std::size_t ring_degree = 0;
  int log_q = 0;
  int max_mult_level = 0;
};

// Throws ConfigInvalid for an unknown name.
Preset preset(const std::string& name);
const std::vector<std::string>& preset_names();

// Byte accounting for the preset (unit costs keep their defaults).
CostModel cost_model_for(const Preset& p);

// Cleartext-simulation parameters used by the protocols: N' slots, t = 2^61 - 1,
// Δ = 2^14, levels and modeled log q taken from the preset.
SchemeParams protocol_params(const Preset& p, std::size_t slots);

inline constexpr std::uint64_t kProtocolPlainModulus = 2305843009213693951ULL;  // 2^61 - 1
inline constexpr std::uint64_t kProtocolScale = 1ULL << 14;

}  // namespace hevfl
