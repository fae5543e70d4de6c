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

#include "hevfl/matmult/transpose.hpp"
#include "hevfl/protocols/common.hpp"
#include "hevfl/simd/metering.hpp"

namespace hevfl::protocols {

// Split network: A's bottom model alpha_A = tanh(X_A U_A); B holds its own
// bottom model, the interactive layer z = alpha_A W_A + alpha_B W_B, h = tanh(z)
// and the output o = h v + c with a sigmoid cross-entropy loss.
struct NnPartyA {
  std::string name;
  Mat x;
  Mat u;
  std::mt19937_64 rng;
  Mat alpha;  // last forward activation
};

struct NnPartyB {
  std::string name;
  Mat x;
  Vec y;
  Mat u, w_a, w_b;
  Vec v;
  double c = 0.0;
  std::mt19937_64 rng;
  // Cached from the last forward pass.
  std::optional<matmult::EncryptedDiagonals> alpha_a;
  std::optional<matmult::EncryptedDiagonals> alpha_a_t;
  Mat alpha_b, z, h;
  Vec o;
};

struct NnForwardStats {
  Vec output;              // o for the batch
  Mat z;                   // interactive pre-activation
  OpCounter cipher_ops;    // B's ciphertext-matrix products
  Measurement party_a, party_b;
};

// A uploads [[alpha_A]] once; B returns the masked products alpha_A W_A in a
// single message and A answers with the unmasked-but-blinded values. With
// `convert_transpose` B prepares [[alpha_A^T]] while it waits.
NnForwardStats vfl_nn_forward(const Backend& keys_a, netsim::Network& net, NnPartyA& a, NnPartyB& b,
                              std::span<const Index> batch, bool convert_transpose = true);

struct NnBackwardStats {
  Mat grad_w_a;
  double loss = 0.0;
  OpCounter cipher_ops;
  Measurement party_a, party_b;
};

// Gradient step for every weight. dW_A = alpha_A^T delta is computed on
// [[alpha_A^T]]; throws MissingConvertedTranspose when the forward pass did
// not prepare it.
NnBackwardStats vfl_nn_backward(const Backend& keys_a, netsim::Network& net, NnPartyA& a, NnPartyB& b,
                                std::span<const Index> batch, double lr);

double sigmoid(double x);

}  // namespace hevfl::protocols
