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

#include <random>
#include <span>
#include <vector>

#include "hevfl/matmult/encode.hpp"
#include "hevfl/matmult/types.hpp"

namespace hevfl::matmult {

struct MatMultOptions {
  // kPackVflDiagonal only: leave the trailing RaS of short-and-wide operands
  // to the decryptor instead of rotating.
  bool lazy = false;
};

// X * [[y]] for every slot-packing method. Methods with an in-ciphertext RaS
// return single-slot plans; packed methods return lazy plans. Throws
// EncodingMismatch when `x` was encoded for another method and
// ReplicationMismatch when `y` has the wrong layout.
PendingResult matmult(const Backend& be, Method method, const DiagonalEncodedMatrix& x,
                      const EncryptedVector& y, const MatMultOptions& options = {});

// The lazy plan and ciphertext count matmult produces for a kPackVfl encoding.
ReductionPlan packvfl_plan(const DiagonalEncodedMatrix& x);
std::size_t packvfl_result_count(const DiagonalEncodedMatrix& x);

// Coefficient-packed product; one LWE ciphertext per row of X.
std::vector<LweHandle> matmult_cheetah(const Backend& be, const DiagonalEncodedMatrix& x,
                                       const EncryptedVector& y);

// Lazy plan of a packed block: row k sums slots s*n + rho + t*m' (k = s*m' + rho).
ReductionPlan packed_plan(std::size_t rows, std::size_t n, std::size_t m_prime, std::size_t slots,
                          std::size_t ct = 0);
ReductionPlan identity_plan(std::size_t rows, std::size_t ct = 0);

// Sum of the slots named by `plan`, mod t. Throws PlanMismatch when the plan
// references ciphertexts or slots that were not supplied.
std::vector<u64> finalize_lazy_ras(const std::vector<std::vector<u64>>& decrypted, const ReductionPlan& plan,
                                   u64 plain_modulus);

std::vector<std::vector<u64>> decrypt_all(const Backend& be, const std::vector<CiphertextHandle>& cts);

// Decrypts and finalizes; result residues mod t.
std::vector<u64> reveal(const Backend& be, const PendingResult& r);

// Splits every element into 2^rounds random addends: after one round
// [v0, v1] becomes [a0, a1, b0, b1] with a_k + b_k = v_k. Throws
// CapacityExceeded when len(v) * 2^rounds > slots.
std::vector<u64> inverse_ras_cleartext(std::span<const u64> v, int rounds, std::size_t slots, u64 plain_modulus,
                                       std::mt19937_64& rng);

// Plan that undoes inverse_ras_cleartext: output k sums slots k + len * u.
ReductionPlan ras_plan(std::size_t length, int rounds);

// Slot vector whose finalize over `plan` (single ciphertext) equals v: the
// value of output k is split into random addends over the slots of plan[k].
std::vector<u64> align_to_plan(std::span<const u64> v, const ReductionPlan& plan, std::size_t slots,
                               u64 plain_modulus, std::mt19937_64& rng);

// Same for plans spread over `ct_count` ciphertexts.
std::vector<std::vector<u64>> align_to_plan_cts(std::span<const u64> v, const ReductionPlan& plan,
                                                std::size_t ct_count, std::size_t slots, u64 plain_modulus,
                                                std::mt19937_64& rng);

// Closed-form counts (padded sizes). kPackVfl beyond N' follows the
// large-operand table.
ComplexityPrediction predict_complexity(Method method, std::size_t m, std::size_t n, std::size_t slots);

// Whether `method` accepts an m x n operand with `slots` slots (ring_degree for Cheetah).
bool method_supports(Method method, std::size_t m, std::size_t n, std::size_t slots, std::size_t ring_degree);

}  // namespace hevfl::matmult
