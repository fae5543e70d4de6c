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

#include "hevfl/rlwe/ntt.hpp"

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

#include "hevfl/error.hpp"
#include "hevfl/simd/params.hpp"

namespace hevfl::rlwe {

Modulus::Modulus(u64 value) : value_(value) {
  if (value < 2 || value >= (1ULL << 62)) throw std::invalid_argument("modulus out of range");
  const u128 ratio = ~static_cast<u128>(0) / value;
  ratio_lo_ = static_cast<u64>(ratio);
  ratio_hi_ = static_cast<u64>(ratio >> 64);
}

NttTables::NttTables(std::size_t n, u64 p) : n_(n), log_n_(log2_exact(n)), mod_(p) {
  if (!is_power_of_two(n) || n < 2) throw std::invalid_argument("NTT size must be a power of two");
  if ((p - 1) % (2 * n) != 0 || !is_prime(p)) {
    throw Error(ErrorCode::kBadModulus, "modulus is not an NTT prime for this ring degree");
  }
  const u64 g = primitive_root(p);
  psi_ = pow_mod(g, (p - 1) / (2 * n), p);
  const u64 psi_inv = inv_mod(psi_, p);
  const u64 omega = mod_.mul(psi_, psi_);
  psi_powers_.resize(n);
  psi_inv_powers_.resize(n);
  u64 a = 1, b = 1;
  for (std::size_t i = 0; i < n; ++i) {
    psi_powers_[i] = a;
    psi_inv_powers_[i] = b;
    a = mod_.mul(a, psi_);
    b = mod_.mul(b, psi_inv);
  }
  fwd_ = make_twiddles(omega);
  inv_ = make_twiddles(inv_mod(omega, p));
  bitrev_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (int k = 0; k < log_n_; ++k) {
      if (i & (std::size_t{1} << k)) r |= std::size_t{1} << (log_n_ - 1 - k);
    }
    bitrev_[i] = r;
  }
  n_inv_ = inv_mod(n % p, p);
}

NttTables::Twiddles NttTables::make_twiddles(u64 omega) const {
  Twiddles tw;
  tw.w.resize(n_ - 1);
  tw.w_shoup.resize(n_ - 1);
  const u64 p = mod_.value();
  for (std::size_t half = 1; half < n_; half <<= 1) {
    const u64 step = pow_mod(omega, n_ / (2 * half), p);
    u64 w = 1;
    for (std::size_t k = 0; k < half; ++k) {
      tw.w[half - 1 + k] = w;
      tw.w_shoup[half - 1 + k] = static_cast<u64>((static_cast<u128>(w) << 64) / p);
      w = mod_.mul(w, step);
    }
  }
  return tw;
}

void NttTables::cyclic_transform(std::vector<u64>& a, const Twiddles& tw) const {
  const u64 p = mod_.value();
  for (std::size_t i = 0; i < n_; ++i) {
    if (i < bitrev_[i]) std::swap(a[i], a[bitrev_[i]]);
  }
  u64* x = a.data();
  for (std::size_t half = 1; half < n_; half <<= 1) {
    const u64* w = tw.w.data() + half - 1;
    const u64* ws = tw.w_shoup.data() + half - 1;
    for (std::size_t start = 0; start < n_; start += 2 * half) {
      u64* lo = x + start;
      u64* hi = lo + half;
      for (std::size_t k = 0; k < half; ++k) {
        // Shoup multiplication by a fixed twiddle.
        const u64 quot = static_cast<u64>((static_cast<u128>(hi[k]) * ws[k]) >> 64);
        u64 v = hi[k] * w[k] - quot * p;
        if (v >= p) v -= p;
        const u64 u = lo[k];
        const u64 sum = u + v;
        lo[k] = sum >= p ? sum - p : sum;
        hi[k] = u >= v ? u - v : u + p - v;
      }
    }
  }
}

void NttTables::forward(std::vector<u64>& a) const {
  for (std::size_t i = 0; i < n_; ++i) a[i] = mod_.mul(a[i], psi_powers_[i]);
  cyclic_transform(a, fwd_);
}

void NttTables::inverse(std::vector<u64>& a) const {
  cyclic_transform(a, inv_);
  for (std::size_t i = 0; i < n_; ++i) a[i] = mod_.mul(mod_.mul(a[i], n_inv_), psi_inv_powers_[i]);
}

std::vector<std::size_t> NttTables::automorphism_permutation(std::size_t galois_elt) const {
  const std::size_t two_n = 2 * n_;
  std::vector<std::size_t> perm(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t e = (2 * j + 1) * galois_elt % two_n;
    perm[j] = (e - 1) / 2;
  }
  return perm;
}

std::shared_ptr<const NttTables> ntt_tables(std::size_t n, u64 p) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, u64>, std::shared_ptr<const NttTables>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(n, p);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto tables = std::make_shared<const NttTables>(n, p);
  cache.emplace(key, tables);
  return tables;
}

PolyRingElement ntt_poly_mult(const PolyRingElement& a, const PolyRingElement& b) {
  if (a.modulus != b.modulus || a.coeffs.size() != b.coeffs.size()) {
    throw Error(ErrorCode::kModulusMismatch, "operands live in different rings");
  }
  auto tables = ntt_tables(a.coeffs.size(), a.modulus);
  std::vector<u64> x = a.coeffs;
  std::vector<u64> y = b.coeffs;
  if (a.domain == PolyDomain::kCoefficient) tables->forward(x);
  if (b.domain == PolyDomain::kCoefficient) tables->forward(y);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = tables->modulus().mul(x[i], y[i]);
  tables->inverse(x);
  return PolyRingElement{a.modulus, std::move(x), PolyDomain::kCoefficient};
}

std::vector<u64> apply_automorphism(const std::vector<u64>& a, std::size_t galois_elt, u64 modulus) {
  const std::size_t n = a.size();
  const std::size_t two_n = 2 * n;
  std::vector<u64> out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t e = i * galois_elt % two_n;
    if (e < n) {
      out[e] = a[i];
    } else {
      out[e - n] = neg_mod(a[i], modulus);
    }
  }
  return out;
}

}  // namespace hevfl::rlwe
