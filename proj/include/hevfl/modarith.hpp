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

#include <cstdint>
#include <vector>

namespace hevfl {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

inline u64 add_mod(u64 a, u64 b, u64 m) {
  u64 s = a + b;
  return (s >= m || s < a) ? s - m : s;
}

inline u64 sub_mod(u64 a, u64 b, u64 m) { return a >= b ? a - b : a + (m - b); }

inline u64 mul_mod(u64 a, u64 b, u64 m) {
  return static_cast<u64>((static_cast<u128>(a) * b) % m);
}

inline u64 neg_mod(u64 a, u64 m) { return a == 0 ? 0 : m - a; }

u64 pow_mod(u64 base, u64 exp, u64 m);

// Modular inverse for prime moduli (Fermat).
u64 inv_mod(u64 a, u64 m);

// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime(u64 n);

// Largest prime p < 2^bits with p = 1 (mod step), skipping everything in `exclude`.
u64 find_ntt_prime(int bits, u64 step, const std::vector<u64>& exclude = {});

// A generator of the multiplicative group of the prime field Z_p.
u64 primitive_root(u64 p);

// Reduces a signed value into [0, m).
inline u64 reduce_signed(i64 v, u64 m) {
  i64 r = v % static_cast<i64>(m);
  return static_cast<u64>(r < 0 ? r + static_cast<i64>(m) : r);
}

// Centered lift of a residue into (-m/2, m/2].
inline i64 centered(u64 v, u64 m) {
  return v > m / 2 ? -static_cast<i64>(m - v) : static_cast<i64>(v);
}

}  // namespace hevfl
