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
#include <memory>
#include <vector>

#include "hevfl/modarith.hpp"

namespace hevfl::rlwe {

// Word-sized prime modulus with a precomputed Barrett ratio floor(2^128 / p).
class Modulus {
 public:
  Modulus() = default;
  explicit Modulus(u64 value);

  u64 value() const { return value_; }

  u64 reduce(u128 x) const {
    const u64 lo = static_cast<u64>(x);
    const u64 hi = static_cast<u64>(x >> 64);
    u64 carry = static_cast<u64>((static_cast<u128>(lo) * ratio_lo_) >> 64);
    u128 t = static_cast<u128>(lo) * ratio_hi_;
    u128 mid = static_cast<u128>(static_cast<u64>(t)) + carry;
    u64 tmp1 = static_cast<u64>(mid);
    u64 tmp3 = static_cast<u64>(t >> 64) + static_cast<u64>(mid >> 64);
    t = static_cast<u128>(hi) * ratio_lo_;
    mid = static_cast<u128>(tmp1) + static_cast<u64>(t);
    carry = static_cast<u64>(t >> 64) + static_cast<u64>(mid >> 64);
    const u64 quotient = hi * ratio_hi_ + tmp3 + carry;
    u64 r = lo - quotient * value_;
    return r >= value_ ? r - value_ : r;
  }

  u64 mul(u64 a, u64 b) const { return reduce(static_cast<u128>(a) * b); }
  u64 add(u64 a, u64 b) const { return add_mod(a, b, value_); }
  u64 sub(u64 a, u64 b) const { return sub_mod(a, b, value_); }
  u64 from_signed(i64 v) const { return reduce_signed(v, value_); }

 private:
  u64 value_ = 0;
  u64 ratio_lo_ = 0;
  u64 ratio_hi_ = 0;
};

// Negacyclic NTT over Z_p[X]/(X^N + 1), natural order in and out.
// Output index j holds the evaluation at psi^(2j+1), psi a primitive 2N-th root.
class NttTables {
 public:
  NttTables(std::size_t n, u64 p);

  std::size_t size() const { return n_; }
  const Modulus& modulus() const { return mod_; }
  u64 psi() const { return psi_; }

  void forward(std::vector<u64>& a) const;
  void inverse(std::vector<u64>& a) const;

  // For a Galois element g (odd, < 2N): evaluation-domain permutation such
  // that NTT(sigma_g(a))[j] = NTT(a)[perm[j]].
  std::vector<std::size_t> automorphism_permutation(std::size_t galois_elt) const;

 private:
  struct Twiddles {
    // Stage with half-length h uses entries [h - 1, 2h - 1).
    std::vector<u64> w;
    std::vector<u64> w_shoup;  // floor(w * 2^64 / p)
  };
  Twiddles make_twiddles(u64 omega) const;
  void cyclic_transform(std::vector<u64>& a, const Twiddles& tw) const;

  std::size_t n_;
  int log_n_;
  Modulus mod_;
  u64 psi_;
  std::vector<u64> psi_powers_;
  std::vector<u64> psi_inv_powers_;
  Twiddles fwd_;
  Twiddles inv_;
  std::vector<std::size_t> bitrev_;
  u64 n_inv_;
};

// Shared, lazily built tables for (N, p).
std::shared_ptr<const NttTables> ntt_tables(std::size_t n, u64 p);

enum class PolyDomain { kCoefficient, kNtt };

// An element of Z_q[X]/(X^N + 1) for a single NTT-friendly prime q.
struct PolyRingElement {
  u64 modulus = 0;
  std::vector<u64> coeffs;
  PolyDomain domain = PolyDomain::kCoefficient;
};

// Negacyclic product via NTT. Throws ModulusMismatch when moduli or sizes differ.
PolyRingElement ntt_poly_mult(const PolyRingElement& a, const PolyRingElement& b);

// sigma_g(a)(X) = a(X^g) on coefficients.
std::vector<u64> apply_automorphism(const std::vector<u64>& a, std::size_t galois_elt, u64 modulus);

}  // namespace hevfl::rlwe
