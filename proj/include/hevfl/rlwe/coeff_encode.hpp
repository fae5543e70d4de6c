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
#include <cstdint>
#include <vector>

#include "hevfl/error.hpp"
#include "hevfl/modarith.hpp"

namespace hevfl::rlwe {

// Coefficient packing of X (m x n) into a degree-N polynomial:
// coefficient i*n + n-1-j holds X(i, j), everything else is zero.
template <typename Derived>
std::vector<i64> coeff_encode_cheetah(const Eigen::MatrixBase<Derived>& x, std::size_t ring_degree) {
  const std::size_t m = static_cast<std::size_t>(x.rows());
  const std::size_t n = static_cast<std::size_t>(x.cols());
  if (m * n > ring_degree) {
    throw Error(ErrorCode::kMatrixTooLarge, "m*n exceeds the ring degree");
  }
  std::vector<i64> out(ring_degree, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[i * n + n - 1 - j] = static_cast<i64>(x(i, j));
  }
  return out;
}

// Coefficient i holds y[i].
template <typename Derived>
std::vector<i64> coeff_encode_vec(const Eigen::MatrixBase<Derived>& y, std::size_t ring_degree) {
  const std::size_t n = static_cast<std::size_t>(y.size());
  if (n > ring_degree) throw Error(ErrorCode::kMatrixTooLarge, "vector exceeds the ring degree");
  std::vector<i64> out(ring_degree, 0);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<i64>(y(static_cast<Eigen::Index>(i)));
  return out;
}

// Coefficient indices that carry (X y)[i] after the product.
inline std::vector<std::size_t> cheetah_output_indices(std::size_t m, std::size_t n) {
  std::vector<std::size_t> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = i * n + n - 1;
  return out;
}

}  // namespace hevfl::rlwe
