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

#include "hevfl/simd/cost_model.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hevfl/error.hpp"

namespace hevfl {

void CostModel::validate() const {
  if (!(cost_rot > cost_hst_rot && cost_hst_rot > cost_mult && cost_mult >= cost_add &&
        cost_add > 0)) {
    throw Error(ErrorCode::kConfigInvalid,
                "cost model must satisfy rot > hst_rot > mult >= add > 0");
  }
  if (ring_degree == 0 || log_q <= 0) {
    throw Error(ErrorCode::kConfigInvalid, "cost model needs positive N and log q");
  }
}

std::uint64_t CostModel::rlwe_ct_bytes() const {
  return 2 * ring_degree * static_cast<std::uint64_t>((log_q + 7) / 8);
}

std::uint64_t CostModel::lwe_ct_bytes() const {
  return (ring_degree + 1) * static_cast<std::uint64_t>((log_q + 7) / 8);
}

double CostModel::cost(const OpCounter& ops) const {
  return cost_add * static_cast<double>(ops.add) + cost_mult * static_cast<double>(ops.mult) +
         cost_rot * static_cast<double>(ops.rot) + cost_hst_rot * static_cast<double>(ops.hst_rot);
}

CostModel CostModel::parse(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigInvalid, std::string("cost model: ") + e.what());
  }
  CostModel m;
  m.cost_add = j.value("cost_add", m.cost_add);
  m.cost_mult = j.value("cost_mult", m.cost_mult);
  m.cost_rot = j.value("cost_rot", m.cost_rot);
  m.cost_hst_rot = j.value("cost_hst_rot", m.cost_hst_rot);
  m.ring_degree = j.value("N", m.ring_degree);
  m.log_q = j.value("log_q", m.log_q);
  m.plain_modulus = j.value("t", m.plain_modulus);
  m.delta = j.value("delta", m.delta);
  m.validate();
  return m;
}

CostModel CostModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace hevfl
