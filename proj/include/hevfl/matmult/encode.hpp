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
#include <type_traits>
#include <vector>

#include "hevfl/error.hpp"
#include "hevfl/matmult/types.hpp"
#include "hevfl/simd/plaintext.hpp"

namespace hevfl::matmult {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

namespace detail {

// Floating scalars are fixed-point encoded at Δ^exp; integral scalars are
// taken as already-scaled residues.
template <typename Scalar>
constexpr int default_exponent() {
  return std::is_floating_point_v<Scalar> ? 1 : 0;
}

template <typename Scalar>
u64 to_residue(Scalar v, const SchemeParams& p, int exp) {
  if constexpr (std::is_floating_point_v<Scalar>) {
    return reduce_signed(to_fixed(static_cast<double>(v), p, exp), p.plain_modulus);
  } else {
    return reduce_signed(static_cast<i64>(v), p.plain_modulus);
  }
}

// Dense copy zero-padded to power-of-two dimensions.
template <typename Derived>
Matrix<typename Derived::Scalar> pad_pow2(const Eigen::MatrixBase<Derived>& x) {
  const auto m = static_cast<Eigen::Index>(next_power_of_two(static_cast<std::size_t>(x.rows())));
  const auto n = static_cast<Eigen::Index>(next_power_of_two(static_cast<std::size_t>(x.cols())));
  Matrix<typename Derived::Scalar> out = Matrix<typename Derived::Scalar>::Zero(m, n);
  out.topLeftCorner(x.rows(), x.cols()) = x;
  return out;
}

// Residue matrix: every later index computation works on u64.
template <typename Derived>
Matrix<u64> residues(const Eigen::MatrixBase<Derived>& x, const SchemeParams& p, int exp) {
  Matrix<u64> out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) out(i, j) = to_residue(x(i, j), p, exp);
  }
  return out;
}

inline u64 at(const Matrix<u64>& x, std::size_t i, std::size_t j) {
  if (i >= static_cast<std::size_t>(x.rows()) || j >= static_cast<std::size_t>(x.cols())) return 0;
  return x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

// Worker functions over padded residue matrices (defined in encode.cpp).
DiagonalEncodedMatrix encode_rows(const Matrix<u64>& x, std::size_t rows, std::size_t cols,
                                  const SchemeParams& p, int exp);
DiagonalEncodedMatrix encode_columns(const Matrix<u64>& x, std::size_t rows, std::size_t cols,
                                     const SchemeParams& p, int exp);
DiagonalEncodedMatrix encode_gala(const Matrix<u64>& x, std::size_t rows, std::size_t cols,
                                  const SchemeParams& p, int exp);
DiagonalEncodedMatrix encode_packvfl(const Matrix<u64>& x, std::size_t rows, std::size_t cols,
                                     const SchemeParams& p, int exp);
DiagonalEncodedMatrix encode_packed(Method scheme, const Matrix<u64>& x, std::size_t rows,
                                    std::size_t cols, const SchemeParams& p, int exp, bool strict);
DiagonalEncodedMatrix encode_partitioned(const Matrix<u64>& x, std::size_t rows, std::size_t cols,
                                         const SchemeParams& p, int exp);
DiagonalEncodedMatrix encode_cheetah(const Matrix<u64>& x, std::size_t rows, std::size_t cols,
                                     const SchemeParams& p, int exp);

}  // namespace detail

// Row order: plaintext i holds row i in slots [0, n).
template <typename Derived>
DiagonalEncodedMatrix encode_row_order(const Eigen::MatrixBase<Derived>& x, const SchemeParams& p,
                                       int exp = detail::default_exponent<typename Derived::Scalar>()) {
  return detail::encode_rows(detail::residues(detail::pad_pow2(x), p, exp), x.rows(), x.cols(), p, exp);
}

// Column order: plaintext j holds column j in slots [0, m).
template <typename Derived>
DiagonalEncodedMatrix encode_column_order(const Eigen::MatrixBase<Derived>& x, const SchemeParams& p,
                                          int exp = detail::default_exponent<typename Derived::Scalar>()) {
  return detail::encode_columns(detail::residues(detail::pad_pow2(x), p, exp), x.rows(), x.cols(), p, exp);
}

// GALA diagonal order: e_i[j] = X[(i + j) mod m, j mod n], repeated over all slots.
template <typename Derived>
DiagonalEncodedMatrix encode_gala_diagonal(const Eigen::MatrixBase<Derived>& x, const SchemeParams& p,
                                           int exp = detail::default_exponent<typename Derived::Scalar>()) {
  return detail::encode_gala(detail::residues(detail::pad_pow2(x), p, exp), x.rows(), x.cols(), p, exp);
}

// e_i[j] = X[j mod m, (i + j) mod n] for i < min(m, n), repeated over all slots.
template <typename Derived>
DiagonalEncodedMatrix encode_packvfl_diagonal(const Eigen::MatrixBase<Derived>& x, const SchemeParams& p,
                                              int exp = detail::default_exponent<typename Derived::Scalar>()) {
  return detail::encode_packvfl(detail::residues(detail::pad_pow2(x), p, exp), x.rows(), x.cols(), p, exp);
}

// Packed diagonals: m' = ceil(mn/N') rows per n-wide section, diagonals wrap
// inside each section. Throws PackingNotApplicable when there is nothing to pack.
template <typename Derived>
DiagonalEncodedMatrix input_pack(const Eigen::MatrixBase<Derived>& x, const SchemeParams& p,
                                 int exp = detail::default_exponent<typename Derived::Scalar>()) {
  return detail::encode_packed(Method::kPackVfl, detail::residues(detail::pad_pow2(x), p, exp), x.rows(),
                               x.cols(), p, exp, true);
}

// Encoding for any method. kPackVfl partitions operands wider or taller than N'.
template <typename Derived>
DiagonalEncodedMatrix encode_for(Method method, const Eigen::MatrixBase<Derived>& x, const SchemeParams& p,
                                 int exp = detail::default_exponent<typename Derived::Scalar>()) {
  const auto r = detail::residues(detail::pad_pow2(x), p, exp);
  const std::size_t rows = static_cast<std::size_t>(x.rows());
  const std::size_t cols = static_cast<std::size_t>(x.cols());
  switch (method) {
    case Method::kNaive:
      return detail::encode_rows(r, rows, cols, p, exp);
    case Method::kColumn:
      return detail::encode_columns(r, rows, cols, p, exp);
    case Method::kGalaDiagonal:
      return detail::encode_gala(r, rows, cols, p, exp);
    case Method::kPackVflDiagonal:
      return detail::encode_packvfl(r, rows, cols, p, exp);
    case Method::kGala:
      return detail::encode_packed(Method::kGala, r, rows, cols, p, exp, false);
    case Method::kPackVfl:
      if (static_cast<std::size_t>(r.rows()) > p.slot_count || static_cast<std::size_t>(r.cols()) > p.slot_count) {
        return detail::encode_partitioned(r, rows, cols, p, exp);
      }
      return detail::encode_packed(Method::kPackVfl, r, rows, cols, p, exp, false);
    case Method::kCheetah:
      return detail::encode_cheetah(r, rows, cols, p, exp);
  }
  throw Error(ErrorCode::kEncodingMismatch, "unknown method");
}

// Slot layout the vector operand must have for `x`.
VectorLayout required_layout(const DiagonalEncodedMatrix& x);

// Builds the plaintexts of y for `layout` (one per ciphertext).
std::vector<Plaintext> vector_plaintexts(const std::vector<u64>& y, const VectorLayout& layout,
                                         const SchemeParams& p, int exp);

template <typename Derived>
EncryptedVector encrypt_vector(const Backend& be, const Eigen::MatrixBase<Derived>& y, const VectorLayout& layout,
                               int exp = detail::default_exponent<typename Derived::Scalar>()) {
  std::vector<u64> r(static_cast<std::size_t>(y.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) r[static_cast<std::size_t>(i)] = detail::to_residue(y(i), be.params(), exp);
  EncryptedVector out{layout, {}};
  for (const Plaintext& pt : vector_plaintexts(r, layout, be.params(), exp)) out.cts.push_back(be.encrypt(pt));
  return out;
}

// Encrypts y in the layout `x` expects.
template <typename Derived>
EncryptedVector encrypt_vector_for(const Backend& be, const DiagonalEncodedMatrix& x,
                                   const Eigen::MatrixBase<Derived>& y,
                                   int exp = detail::default_exponent<typename Derived::Scalar>()) {
  return encrypt_vector(be, y, required_layout(x), exp);
}

PartitionPlan plan_partition(std::size_t m, std::size_t n, std::size_t slots);

}  // namespace hevfl::matmult
