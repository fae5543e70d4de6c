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

#include "hevfl/matmult/transpose.hpp"

#include <algorithm>
#include <optional>

#include "hevfl/error.hpp"
#include "hevfl/matmult/matmult.hpp"

namespace hevfl::matmult {

std::vector<TransposeStep> transpose_offset_table(std::size_t m, std::size_t n) {
  m = next_power_of_two(m);
  n = next_power_of_two(n);
  std::vector<TransposeStep> table;
  for (std::size_t i = 0; i < std::min(m, n); ++i) {
    TransposeStep s;
    s.target = i;
    if (m >= n) {
      s.source = (n - i) % n;
      s.right_offset = (m - i) % m;
    } else {
      s.source = (m - i) % m;
      s.right_offset = s.source;
    }
    table.push_back(s);
  }
  return table;
}

EncryptedDiagonals transpose_diag_convert(const Backend& be, const EncryptedDiagonals& x) {
  if (x.packed) throw Error(ErrorCode::kLayoutUnsupported, "transposed conversion needs unpacked diagonals");
  if (x.cts.size() != std::min(x.m, x.n)) {
    throw Error(ErrorCode::kShapeMismatch, "diagonal count does not match the shape");
  }
  EncryptedDiagonals out{x.cols, x.rows, x.n, x.m, false, {}};
  for (const TransposeStep& s : transpose_offset_table(x.m, x.n)) {
    const CiphertextHandle& src = x.cts[s.source];
    out.cts.push_back(s.right_offset == 0 ? src : be.rotate(src, s.right_offset, RotationDirection::kRight));
  }
  return out;
}

PendingResult matmult_cipher_matrix(const Backend& be, const EncryptedDiagonals& x, std::span<const u64> w,
                                    int w_exponent) {
  if (w.size() > x.n) throw Error(ErrorCode::kShapeMismatch, "vector longer than the matrix width");
  const std::size_t slots = be.slot_count();
  std::optional<CiphertextHandle> acc;
  for (std::size_t i = 0; i < x.cts.size(); ++i) {
    std::vector<u64> rotated(slots);
    for (std::size_t j = 0; j < slots; ++j) {
      const std::size_t idx = (i + j) % x.n;
      rotated[j] = idx < w.size() ? w[idx] : 0;
    }
    const CiphertextHandle p = be.mult_plain(from_residues(std::move(rotated), be.params(), w_exponent), x.cts[i]);
    acc = acc ? be.add(*acc, p) : p;
  }
  PendingResult out;
  out.ciphertexts.push_back(*acc);
  out.plan = cipher_matrix_plan(x, slots);
  out.lazy = x.m < x.n;
  return out;
}

ReductionPlan cipher_matrix_plan(const EncryptedDiagonals& x, std::size_t slots) {
  return x.m < x.n ? packed_plan(x.rows, x.n, x.m, slots) : identity_plan(x.rows);
}

}  // namespace hevfl::matmult
