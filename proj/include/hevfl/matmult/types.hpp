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

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hevfl/simd/backend.hpp"
#include "hevfl/simd/metering.hpp"

namespace hevfl::matmult {

// kGalaDiagonal / kPackVflDiagonal are the unpacked diagonal methods;
// kGala / kPackVfl add input packing and (for kPackVfl) lazy RaS and partitioning.
enum class Method { kNaive, kColumn, kGalaDiagonal, kPackVflDiagonal, kGala, kPackVfl, kCheetah };

std::string to_string(Method m);
// Accepts the names printed by to_string ("naive", "packvfl-diagonal", ...).
Method method_from_string(const std::string& name);
const std::vector<Method>& all_methods();

enum class PartitionCase { kTall, kWide, kGrid };  // m>N'>=n, m<=N'<n, m,n>N'

std::string to_string(PartitionCase c);

struct PartitionPlan {
  PartitionCase kind = PartitionCase::kTall;
  std::size_t row_blocks = 1;
  std::size_t col_blocks = 1;
  std::size_t block_rows = 0;
  std::size_t block_cols = 0;
};

// Layout of an encrypted vector operand.
enum class VectorKind {
  kPlain,              // y in slots [0, n), rest zero
  kElementReplicated,  // one ciphertext per element, value in every slot
  kPattern,            // y repeated with period `period` over all slots
  kCoefficient,        // y as polynomial coefficients
};

struct VectorLayout {
  VectorKind kind = VectorKind::kPlain;
  std::size_t length = 0;  // padded length n
  std::size_t period = 0;  // kPattern only
  std::size_t blocks = 1;  // column blocks for partitioned operands
  friend bool operator==(const VectorLayout&, const VectorLayout&) = default;
};

struct EncryptedVector {
  VectorLayout layout;
  std::vector<CiphertextHandle> cts;
};

// A plaintext matrix prepared for one method. blocks[r][c] lists the
// plaintexts of row block r and column block c (a single block unless partitioned).
struct DiagonalEncodedMatrix {
  Method scheme = Method::kPackVfl;
  std::size_t rows = 0, cols = 0;  // original shape
  std::size_t m = 0, n = 0;        // padded shape
  std::size_t slots = 0;           // N'
  bool packed = false;
  std::size_t diagonals_per_block = 0;
  std::optional<PartitionPlan> partition;
  std::vector<std::vector<std::vector<Plaintext>>> blocks;

  const std::vector<Plaintext>& diagonals() const { return blocks.front().front(); }
};

struct SlotRef {
  std::size_t ct = 0;
  std::size_t slot = 0;
  friend bool operator==(const SlotRef&, const SlotRef&) = default;
};

// plan[k] lists the slots whose sum is output k.
using ReductionPlan = std::vector<std::vector<SlotRef>>;

struct PendingResult {
  std::vector<CiphertextHandle> ciphertexts;
  ReductionPlan plan;
  bool lazy = false;  // false: every output is a single slot
};

enum class CtKind { kRlwe, kLwe };

struct ComplexityPrediction {
  OpCounter ops;
  std::size_t ct_b_to_a = 0;  // vector ciphertexts sent by the vector owner
  std::size_t ct_a_to_b = 0;  // result ciphertexts sent back
  CtKind result_kind = CtKind::kRlwe;
  friend bool operator==(const ComplexityPrediction&, const ComplexityPrediction&) = default;
};

}  // namespace hevfl::matmult
