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

#include <optional>
#include <random>
#include <span>
#include <string>

#include "hevfl/protocols/common.hpp"
#include "hevfl/simd/metering.hpp"

namespace hevfl::protocols {

// Data owner in linear regression. Only B carries labels.
struct LinrParty {
  std::string name;
  Mat x;
  Vec theta;
  std::optional<Vec> y;
  std::mt19937_64 rng;
};

struct LinrIterationStats {
  Vec grad_a;  // mean-loss gradients as recovered by the parties
  Vec grad_b;
  OpCounter matmult_a;  // the X^T [[d]] product only
  OpCounter matmult_b;
  Measurement party_a, party_b, arbiter;
};

// One gradient step. The arbiter "C" owns the keys of `arbiter_keys`; A and B
// only encrypt with them. Loss is 1/(2m) * |X theta - y|^2 over the batch.
// Throws ShapeMismatch on inconsistent inputs, LevelExhausted when the
// parameters admit no multiplication.
LinrIterationStats vfl_linr_iteration(const Backend& arbiter_keys, netsim::Network& net, LinrParty& a,
                                      LinrParty& b, std::span<const Index> batch, double lr);

}  // namespace hevfl::protocols
