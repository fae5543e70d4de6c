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

#include "hevfl/simd/plaintext.hpp"

#include <cmath>
#include <string>

#include "hevfl/error.hpp"

namespace hevfl {

void SchemeParams::validate() const {
  if (!is_power_of_two(ring_degree)) {
    throw Error(ErrorCode::kConfigInvalid, "ring degree must be a power of two");
  }
  if (!is_power_of_two(slot_count)) {
    throw Error(ErrorCode::kConfigInvalid, "slot count must be a power of two");
  }
  if (coeff_modulus_bits <= 0) throw Error(ErrorCode::kConfigInvalid, "log q must be positive");
  if (plain_modulus < 3) throw Error(ErrorCode::kConfigInvalid, "plain modulus too small");
  if (scale < 1) throw Error(ErrorCode::kConfigInvalid, "scale must be >= 1");
  if (max_mult_level < 1) throw Error(ErrorCode::kConfigInvalid, "multiplication level must be >= 1");
}

std::size_t next_power_of_two(std::size_t v) {
  std::size_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

int log2_exact(std::size_t v) {
  int r = 0;
  while ((std::size_t{1} << r) < v) ++r;
  return r;
}

double scale_power(const SchemeParams& p, int exponent) {
  return std::pow(static_cast<double>(p.scale), exponent);
}

i64 to_fixed(double v, const SchemeParams& p, int scale_exponent) {
  return static_cast<i64>(std::llround(v * scale_power(p, scale_exponent)));
}

double from_fixed(i64 v, const SchemeParams& p, int scale_exponent) {
  return static_cast<double>(v) / scale_power(p, scale_exponent);
}

namespace {

void check_length(std::size_t len, const SchemeParams& p, Domain domain) {
  std::size_t cap = domain == Domain::kSlots ? p.slot_count : p.ring_degree;
  if (len > cap) {
    throw Error(ErrorCode::kVectorTooLong,
                std::to_string(len) + " values exceed capacity " + std::to_string(cap));
  }
}

void check_magnitude(i64 scaled, const SchemeParams& p) {
  u64 mag = scaled < 0 ? static_cast<u64>(-(scaled + 1)) + 1 : static_cast<u64>(scaled);
  if (mag >= p.plain_modulus / 2 + (p.plain_modulus % 2 == 0 ? 0 : 1)) {
    throw Error(ErrorCode::kOverflowAtScale,
                "value " + std::to_string(scaled) + " does not fit modulus " +
                    std::to_string(p.plain_modulus));
  }
}

std::size_t capacity(const SchemeParams& p, Domain domain) {
  return domain == Domain::kSlots ? p.slot_count : p.ring_degree;
}

}  // namespace

Plaintext encode(std::span<const double> v, const SchemeParams& p, int scale_exponent) {
  check_length(v.size(), p, Domain::kSlots);
  Plaintext pt;
  pt.values.assign(p.slot_count, 0);
  pt.scale_exponent = scale_exponent;
  double factor = scale_power(p, scale_exponent);
  for (std::size_t i = 0; i < v.size(); ++i) {
    double scaled = std::round(v[i] * factor);
    if (!(std::fabs(scaled) < static_cast<double>(p.plain_modulus) / 2.0)) {
      throw Error(ErrorCode::kOverflowAtScale, "value " + std::to_string(v[i]) + " overflows at scale");
    }
    pt.values[i] = reduce_signed(static_cast<i64>(scaled), p.plain_modulus);
  }
  return pt;
}

Plaintext encode_integers(std::span<const i64> v, const SchemeParams& p, int scale_exponent,
                          Domain domain) {
  check_length(v.size(), p, domain);
  Plaintext pt;
  pt.values.assign(capacity(p, domain), 0);
  pt.scale_exponent = scale_exponent;
  pt.domain = domain;
  for (std::size_t i = 0; i < v.size(); ++i) {
    check_magnitude(v[i], p);
    pt.values[i] = reduce_signed(v[i], p.plain_modulus);
  }
  return pt;
}

Plaintext from_residues(std::vector<u64> residues, const SchemeParams& p, int scale_exponent,
                        Domain domain) {
  check_length(residues.size(), p, domain);
  residues.resize(capacity(p, domain), 0);
  for (u64& r : residues) r %= p.plain_modulus;
  return Plaintext{std::move(residues), scale_exponent, domain};
}

std::vector<i64> centered_values(const Plaintext& pt, u64 plain_modulus) {
  std::vector<i64> out(pt.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = centered(pt.values[i], plain_modulus);
  return out;
}

std::vector<double> decode(const Plaintext& pt, const SchemeParams& p) {
  std::vector<double> out(pt.values.size());
  double factor = scale_power(p, pt.scale_exponent);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<double>(centered(pt.values[i], p.plain_modulus)) / factor;
  }
  return out;
}

}  // namespace hevfl
