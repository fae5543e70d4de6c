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

#include "hevfl/presets.hpp"

#include "hevfl/error.hpp"
#include "hevfl/simd/semantic_backend.hpp"

namespace hevfl {

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"paper-122", "paper-156", "desk-1024"};
  return names;
}

Preset preset(const std::string& name) {
  if (name == "paper-122") return Preset{name, 8192, 122, 1};
  if (name == "paper-156") return Preset{name, 8192, 156, 2};
  if (name == "desk-1024") return Preset{name, 1024, 106, 2};
  throw Error(ErrorCode::kConfigInvalid, "unknown preset '" + name + "' (paper-122, paper-156, desk-1024)");
}

CostModel cost_model_for(const Preset& p) {
  CostModel c;
  c.ring_degree = p.ring_degree;
  c.log_q = p.log_q;
  return c;
}

SchemeParams protocol_params(const Preset& p, std::size_t slots) {
  return semantic_params(slots, kProtocolPlainModulus, kProtocolScale, p.max_mult_level, p.log_q);
}

}  // namespace hevfl
