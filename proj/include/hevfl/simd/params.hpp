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
#include <cstdint>

namespace hevfl {

// Parameters shared by every SIMD backend. `slot_count` is what the active
// backend reports (N for the cleartext simulation by default, N/2 for the
// lattice backend). `coeff_modulus_bits` is the modulus size used for
// communication accounting and may exceed the live modulus of a desk-scale run.
struct SchemeParams {
  std::size_t ring_degree = 1024;
  std::size_t slot_count = 1024;
  int coeff_modulus_bits = 122;
  std::uint64_t plain_modulus = 1099511627689ULL;  // prime, just below 2^40
  std::uint64_t scale = 1ULL << 10;
  int max_mult_level = 2;

  // Throws ConfigInvalid on a violated invariant.
  void validate() const;
};

inline bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

std::size_t next_power_of_two(std::size_t v);

int log2_exact(std::size_t v);

inline std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

}  // namespace hevfl
