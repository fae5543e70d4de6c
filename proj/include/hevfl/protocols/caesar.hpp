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
#include <vector>

#include "hevfl/matmult/types.hpp"
#include "hevfl/protocols/common.hpp"
#include "hevfl/protocols/shares.hpp"
#include "hevfl/simd/metering.hpp"

namespace hevfl::protocols {

// sigmoid(z) ~ q0 + q1 z + q2 z^3.
struct SigmoidPoly {
  double q0 = 0.5;
  double q1 = 0.197;
  double q2 = -0.004;
  double operator()(double z) const { return q0 + q1 * z + q2 * z * z * z; }
};

// Logistic-regression party with secret-shared weights at scale Δ. A is
// share index 0 and B share index 1 in every truncation.
struct CaesarParty {
  std::string name;
  Mat x;
  std::optional<Vec> y;
  std::vector<u64> own_share;   // share of this party's weights
  std::vector<u64> peer_share;  // share of the peer's weights
  std::mt19937_64 rng;
};

// Each party splits its initial weights and sends one share to the peer.
void caesar_share_weights(const SchemeParams& p, netsim::Network& net, CaesarParty& a, const Vec& w_a,
                          CaesarParty& b, const Vec& w_b);

// Weights of `owner` reconstructed from both parties' shares.
Vec caesar_weights(const SchemeParams& p, const CaesarParty& owner, const CaesarParty& peer);

struct CaesarForwardResult {
  Shares z;         // z = X_A w_A + X_B w_B at Δ; first at A, second at B
  Shares za_cross;  // X_A <w_A>_2 at Δ^2: first is A's mask sum, second B's decryption
  Shares zb_cross;  // X_B <w_B>_1 at Δ^2: first is A's decryption, second B's mask sum
  OpCounter matmult_a, matmult_b;
  Measurement party_a, party_b;
};

// Shares of the batch logits. keys_a / keys_b are the key pairs A and B
// decrypt with; each encrypts its share of the peer's weights under its own key.
CaesarForwardResult caesar_forward(const Backend& keys_a, const Backend& keys_b, netsim::Network& net,
                                   CaesarParty& a, CaesarParty& b, std::span<const Index> batch);

struct GradientCiphertexts {
  matmult::PendingResult result;  // sum_j e_j x_j at Δ^(1 + result exponent)
  int levels_consumed = 0;
  OpCounter ops;
};

// Gradient ingredients for the label holder with the folded form
// (q0 1 - y)^T X + (q1 X)^T [[z]] + (q2 X)^T [[z^3]]: the cleartext term is
// spread over the lazy plan, so one multiplication level suffices.
GradientCiphertexts caesar_gradient_mlr(const Backend& be, const matmult::EncryptedVector& z,
                                        const matmult::EncryptedVector& z3, const Mat& x, const Vec& y,
                                        const SigmoidPoly& q, std::mt19937_64& rng);

// The direct form: [[e]] = q0 + q1 [[z]] + q2 [[z^3]] - y, then [[e]]^T X.
// Needs two levels; the result carries Δ^3.
GradientCiphertexts caesar_gradient_unreduced(const Backend& be, const matmult::EncryptedVector& z,
                                              const matmult::EncryptedVector& z3, const Mat& x, const Vec& y,
                                              const SigmoidPoly& q);

struct CaesarIterationStats {
  CaesarForwardResult forward;
  int levels_consumed_a = 0;  // gradient path of A's weights
  int levels_consumed_b = 0;  // gradient path of B's weights
  Measurement party_a, party_b;
};

// Forward pass, share-domain cube, both gradient paths, and the share update
// w -= lr/m * g. `dealer` stands for the offline triple dealer.
CaesarIterationStats caesar_iteration(const Backend& keys_a, const Backend& keys_b, netsim::Network& net,
                                      CaesarParty& a, CaesarParty& b, std::span<const Index> batch, double lr,
                                      const SigmoidPoly& q, std::mt19937_64& dealer, bool fold_levels = true);

}  // namespace hevfl::protocols
