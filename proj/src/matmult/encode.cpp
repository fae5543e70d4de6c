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

#include "hevfl/matmult/encode.hpp"

#include <algorithm>
#include <string>

namespace hevfl::matmult {

namespace {

std::size_t dim(Eigen::Index v) { return static_cast<std::size_t>(v); }

void require_fits(std::size_t m, std::size_t n, std::size_t slots, const char* what) {
  if (m > slots || n > slots) {
    throw Error(ErrorCode::kOperandTooLarge, std::string(what) + ": " + std::to_string(m) + "x" +
                                                 std::to_string(n) + " exceeds " + std::to_string(slots) +
                                                 " slots");
  }
}

DiagonalEncodedMatrix shell(Method scheme, const Matrix<u64>& x, std::size_t rows, std::size_t cols,
                            const SchemeParams& p) {
  DiagonalEncodedMatrix e;
  e.scheme = scheme;
  e.rows = rows;
  e.cols = cols;
  e.m = dim(x.rows());
  e.n = dim(x.cols());
  e.slots = p.slot_count;
  e.blocks.assign(1, std::vector<std::vector<Plaintext>>(1));
  return e;
}

Plaintext slot_pt(std::vector<u64> v, const SchemeParams& p, int exp) {
  return from_residues(std::move(v), p, exp, Domain::kSlots);
}

// Packed diagonals of one block (m, n <= N').
std::vector<Plaintext> packed_diagonals(Method scheme, const Matrix<u64>& x, const SchemeParams& p, int exp,
                                        std::size_t& m_prime) {
  const std::size_t m = dim(x.rows());
  const std::size_t n = dim(x.cols());
  const std::size_t slots = p.slot_count;
  m_prime = std::max<std::size_t>(1, m * n / slots);
  const std::size_t sections = slots / n;
  std::vector<Plaintext> out;
  for (std::size_t i = 0; i < m_prime; ++i) {
    std::vector<u64> v(slots, 0);
    for (std::size_t s = 0; s < sections; ++s) {
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t row = s * m_prime + j % m_prime;
        if (scheme == Method::kPackVfl) {
          v[s * n + j] = detail::at(x, row, (i + j) % n);
        } else {
          v[(s * n + j + slots - i) % slots] = detail::at(x, row, (j + n - i) % n);
        }
      }
    }
    out.push_back(slot_pt(std::move(v), p, exp));
  }
  return out;
}

}  // namespace

namespace detail {

DiagonalEncodedMatrix encode_rows(const Matrix<u64>& x, std::size_t rows, std::size_t cols,
                                  const SchemeParams& p, int exp) {
  auto e = shell(Method::kNaive, x, rows, cols, p);
  require_fits(e.m, e.n, e.slots, "row order");
  for (std::size_t i = 0; i < e.m; ++i) {
    std::vector<u64> v(e.slots, 0);
    for (std::size_t j = 0; j < e.n; ++j) v[j] = at(x, i, j);
    e.blocks[0][0].push_back(slot_pt(std::move(v), p, exp));
  }
  e.diagonals_per_block = e.m;
  return e;
}

DiagonalEncodedMatrix encode_columns(const Matrix<u64>& x, std::size_t rows, std::size_t cols,
                                     const SchemeParams& p, int exp) {
  auto e = shell(Method::kColumn, x, rows, cols, p);
  require_fits(e.m, e.n, e.slots, "column order");
  for (std::size_t j = 0; j < e.n; ++j) {
    std::vector<u64> v(e.slots, 0);
    for (std::size_t i = 0; i < e.m; ++i) v[i] = at(x, i, j);
    e.blocks[0][0].push_back(slot_pt(std::move(v), p, exp));
  }
  e.diagonals_per_block = e.n;
  return e;
}

DiagonalEncodedMatrix encode_gala(const Matrix<u64>& x, std::size_t rows, std::size_t cols,
                                  const SchemeParams& p, int exp) {
  auto e = shell(Method::kGalaDiagonal, x, rows, cols, p);
  require_fits(e.m, e.n, e.slots, "GALA diagonal");
  const std::size_t d = std::min(e.m, e.n);
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<u64> v(e.slots);
    for (std::size_t j = 0; j < e.slots; ++j) v[j] = at(x, (i + j) % e.m, j % e.n);
    e.blocks[0][0].push_back(slot_pt(std::move(v), p, exp));
  }
  e.diagonals_per_block = d;
  return e;
}

DiagonalEncodedMatrix encode_packvfl(const Matrix<u64>& x, std::size_t rows, std::size_t cols,
                                     const SchemeParams& p, int exp) {
  auto e = shell(Method::kPackVflDiagonal, x, rows, cols, p);
  require_fits(e.m, e.n, e.slots, "diagonal");
  const std::size_t d = std::min(e.m, e.n);
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<u64> v(e.slots);
    for (std::size_t j = 0; j < e.slots; ++j) v[j] = at(x, j % e.m, (i + j) % e.n);
    e.blocks[0][0].push_back(slot_pt(std::move(v), p, exp));
  }
  e.diagonals_per_block = d;
  return e;
}

DiagonalEncodedMatrix encode_packed(Method scheme, const Matrix<u64>& x, std::size_t rows, std::size_t cols,
                                    const SchemeParams& p, int exp, bool strict) {
  auto e = shell(scheme, x, rows, cols, p);
  require_fits(e.m, e.n, e.slots, "packed diagonal");
  std::size_t m_prime = 0;
  e.blocks[0][0] = packed_diagonals(scheme, x, p, exp, m_prime);
  if (strict && m_prime == e.m && e.m > 1) {
    throw Error(ErrorCode::kPackingNotApplicable, "no vacant slots to pack into (m' = m)");
  }
  e.packed = true;
  e.diagonals_per_block = m_prime;
  return e;
}

DiagonalEncodedMatrix encode_partitioned(const Matrix<u64>& x, std::size_t rows, std::size_t cols,
                                         const SchemeParams& p, int exp) {
  auto e = shell(Method::kPackVfl, x, rows, cols, p);
  const PartitionPlan plan = plan_partition(e.m, e.n, e.slots);
  e.partition = plan;
  e.packed = true;
  e.blocks.assign(plan.row_blocks, std::vector<std::vector<Plaintext>>(plan.col_blocks));
  for (std::size_t r = 0; r < plan.row_blocks; ++r) {
    for (std::size_t c = 0; c < plan.col_blocks; ++c) {
      Matrix<u64> block = x.block(static_cast<Eigen::Index>(r * plan.block_rows),
                                  static_cast<Eigen::Index>(c * plan.block_cols),
                                  static_cast<Eigen::Index>(plan.block_rows),
                                  static_cast<Eigen::Index>(plan.block_cols));
      std::size_t m_prime = 0;
      e.blocks[r][c] = packed_diagonals(Method::kPackVfl, block, p, exp, m_prime);
      e.diagonals_per_block = m_prime;
    }
  }
  return e;
}

DiagonalEncodedMatrix encode_cheetah(const Matrix<u64>& x, std::size_t rows, std::size_t cols,
                                     const SchemeParams& p, int exp) {
  auto e = shell(Method::kCheetah, x, rows, cols, p);
  if (e.m * e.n > p.ring_degree) {
    throw Error(ErrorCode::kMatrixTooLarge, "m*n exceeds the ring degree");
  }
  std::vector<u64> coeffs(p.ring_degree, 0);
  for (std::size_t i = 0; i < e.m; ++i) {
    for (std::size_t j = 0; j < e.n; ++j) coeffs[i * e.n + e.n - 1 - j] = at(x, i, j);
  }
  e.blocks[0][0].push_back(from_residues(std::move(coeffs), p, exp, Domain::kCoefficients));
  e.diagonals_per_block = 1;
  return e;
}

}  // namespace detail

PartitionPlan plan_partition(std::size_t m, std::size_t n, std::size_t slots) {
  m = next_power_of_two(m);
  n = next_power_of_two(n);
  if (m <= slots && n <= slots) {
    throw Error(ErrorCode::kNotRequired, "operand fits in one ciphertext");
  }
  PartitionPlan plan;
  plan.kind = m > slots && n > slots ? PartitionCase::kGrid
              : m > slots            ? PartitionCase::kTall
                                     : PartitionCase::kWide;
  plan.block_rows = std::min(m, slots);
  plan.block_cols = std::min(n, slots);
  plan.row_blocks = m / plan.block_rows;
  plan.col_blocks = n / plan.block_cols;
  return plan;
}

VectorLayout required_layout(const DiagonalEncodedMatrix& x) {
  switch (x.scheme) {
    case Method::kNaive:
      return {VectorKind::kPlain, x.n, 0, 1};
    case Method::kColumn:
      return {VectorKind::kElementReplicated, x.n, 0, 1};
    case Method::kCheetah:
      return {VectorKind::kCoefficient, x.n, 0, 1};
    default:
      break;
  }
  if (x.partition) return {VectorKind::kPattern, x.n, x.partition->block_cols, x.partition->col_blocks};
  return {VectorKind::kPattern, x.n, x.n, 1};
}

std::vector<Plaintext> vector_plaintexts(const std::vector<u64>& y, const VectorLayout& layout,
                                         const SchemeParams& p, int exp) {
  if (y.size() > layout.length) {
    throw Error(ErrorCode::kShapeMismatch, "vector longer than the layout");
  }
  std::vector<u64> v(layout.length, 0);
  std::copy(y.begin(), y.end(), v.begin());
  const std::size_t slots = p.slot_count;
  std::vector<Plaintext> out;
  switch (layout.kind) {
    case VectorKind::kPlain: {
      if (layout.length > slots) throw Error(ErrorCode::kOperandTooLarge, "vector exceeds slot count");
      v.resize(slots, 0);
      out.push_back(from_residues(v, p, exp));
      break;
    }
    case VectorKind::kElementReplicated:
      for (u64 x : v) out.push_back(from_residues(std::vector<u64>(slots, x), p, exp));
      break;
    case VectorKind::kPattern: {
      if (layout.period == 0 || layout.period > slots || slots % layout.period != 0) {
        throw Error(ErrorCode::kReplicationMismatch, "pattern period must divide the slot count");
      }
      for (std::size_t c = 0; c < layout.blocks; ++c) {
        std::vector<u64> s(slots);
        for (std::size_t j = 0; j < slots; ++j) {
          const std::size_t idx = c * layout.period + j % layout.period;
          s[j] = idx < v.size() ? v[idx] : 0;
        }
        out.push_back(from_residues(std::move(s), p, exp));
      }
      break;
    }
    case VectorKind::kCoefficient: {
      if (layout.length > p.ring_degree) throw Error(ErrorCode::kMatrixTooLarge, "vector exceeds ring degree");
      v.resize(p.ring_degree, 0);
      out.push_back(from_residues(v, p, exp, Domain::kCoefficients));
      break;
    }
  }
  return out;
}

}  // namespace hevfl::matmult
