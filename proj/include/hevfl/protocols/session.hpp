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

#include <Eigen/Dense>
#include <vector>

#include "hevfl/matmult/types.hpp"
#include "hevfl/netsim/netsim.hpp"

namespace hevfl::protocols {

using IMat = Eigen::Matrix<i64, Eigen::Dynamic, Eigen::Dynamic>;
using IVec = Eigen::Matrix<i64, Eigen::Dynamic, 1>;

struct MatmultSessionResult {
  std::vector<i64> values;  // X y, centered mod t
  OpCounter ops;            // matrix owner's product only
  netsim::Transcript transcript;
  CommStats comm;
  netsim::AuditReport audit;  // against predict_complexity for the padded shape
  double wall_seconds = 0.0;
};

// Two-party product: B (key owner) sends [[y]], A runs `method` on its
// cleartext X and returns the result ciphertexts (LWE batch for kCheetah).
MatmultSessionResult run_matmult_session(const Backend& be, matmult::Method method, const IMat& x, const IVec& y,
                                         const CostModel& sizes, const netsim::ChannelSpec& spec = {});

}  // namespace hevfl::protocols
