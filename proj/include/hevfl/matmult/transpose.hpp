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
#include <span>
#include <vector>

#include "hevfl/matmult/encode.hpp"
#include "hevfl/matmult/types.hpp"

namespace hevfl::matmult {

// Diagonal encoding (e_i[j] = X[j mod m, (i + j) mod n]) of an encrypted m x n matrix.
struct EncryptedDiagonals {
  std::size_t rows = 0, cols = 0;  // original shape
  std::size_t m = 0, n = 0;        // padded shape
  bool packed = false;
  std::vector<CiphertextHandle> cts;
};

template <typename Derived>
EncryptedDiagonals encrypt_diagonals(const Backend& be, const Eigen::MatrixBase<Derived>& x,
                                     int exp = detail::default_exponent<typename Derived::Scalar>()) {
  const DiagonalEncodedMatrix e = encode_packvfl_diagonal(x, be.params(), exp);
  EncryptedDiagonals out{e.rows, e.cols, e.m, e.n, false, {}};
  for (const Plaintext& d : e.diagonals()) out.cts.push_back(be.encrypt(d));
  return out;
}

// Diagonal i of X^T equals RotR(e_source, right_offset) of X's diagonals.
struct TransposeStep {
  std::size_t target = 0;
  std::size_t source = 0;
  std::size_t right_offset = 0;
  friend bool operator==(const TransposeStep&, const TransposeStep&) = default;
};

// Derived offsets (padded m, n): for m >= n, source (n - i) mod n and offset
// (m - i) mod m; for m < n, source = offset = (m - i) mod m.
std::vector<TransposeStep> transpose_offset_table(std::size_t m, std::size_t n);

// Converts encrypted diagonals of X into those of X^T with min(m, n) - 1 O3
// rotations. Throws LayoutUnsupported for packed inputs.
EncryptedDiagonals transpose_diag_convert(const Backend& be, const EncryptedDiagonals& x);

// [[X]] * w with cleartext w (residues, length cols): rotations act on the
// cleartext side only, so no O3/O4 is recorded.
PendingResult matmult_cipher_matrix(const Backend& be, const EncryptedDiagonals& x, std::span<const u64> w,
                                    int w_exponent);

// Plan of matmult_cipher_matrix's result; depends only on the shape.
ReductionPlan cipher_matrix_plan(const EncryptedDiagonals& x, std::size_t slots);

}  // namespace hevfl::matmult
