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

#include "hevfl/modarith.hpp"

#include <algorithm>
#include <stdexcept>

namespace hevfl {

u64 pow_mod(u64 base, u64 exp, u64 m) {
  u64 result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

u64 inv_mod(u64 a, u64 m) { return pow_mod(a, m - 2, m); }

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

u64 find_ntt_prime(int bits, u64 step, const std::vector<u64>& exclude) {
  if (bits < 2 || bits > 62) throw std::invalid_argument("find_ntt_prime: bits out of range");
  u64 upper = (1ULL << bits) - 1;
  u64 candidate = upper - (upper % step) + 1;
  if (candidate > upper) candidate -= step;
  for (; candidate > step; candidate -= step) {
    if (std::find(exclude.begin(), exclude.end(), candidate) != exclude.end()) continue;
    if (is_prime(candidate)) return candidate;
  }
  throw std::runtime_error("find_ntt_prime: no prime found");
}

u64 primitive_root(u64 p) {
  std::vector<u64> factors;
  u64 phi = p - 1;
  u64 rest = phi;
  for (u64 f = 2; f * f <= rest; ++f) {
    if (rest % f == 0) {
      factors.push_back(f);
      while (rest % f == 0) rest /= f;
    }
  }
  if (rest > 1) factors.push_back(rest);
  for (u64 g = 2; g < p; ++g) {
    bool ok = true;
    for (u64 f : factors) {
      if (pow_mod(g, phi / f, p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  throw std::runtime_error("primitive_root: none found");
}

}  // namespace hevfl
