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
#include <span>
#include <vector>

#include "hevfl/modarith.hpp"
#include "hevfl/simd/params.hpp"

namespace hevfl {

// Slot plaintexts are batched vectors; coefficient plaintexts are raw
// polynomial coefficients (used by coefficient packing).
enum class Domain { kSlots, kCoefficients };

// Residues modulo the plain modulus t. Fixed-point values carry Δ^scale_exponent.
struct Plaintext {
  std::vector<u64> values;
  int scale_exponent = 0;
  Domain domain = Domain::kSlots;

  std::size_t size() const { return values.size(); }
};

// Fixed-point encoding: slot i = round(v[i] * Δ^scale_exponent) mod t, vacant slots zero.
Plaintext encode(std::span<const double> v, const SchemeParams& p, int scale_exponent = 1);

// Integer encoding of values that are already scaled; no multiplication by Δ.
Plaintext encode_integers(std::span<const i64> v, const SchemeParams& p, int scale_exponent = 0,
                          Domain domain = Domain::kSlots);

// Wraps residues that are already reduced mod t (e.g. secret shares).
Plaintext from_residues(std::vector<u64> residues, const SchemeParams& p, int scale_exponent,
                        Domain domain = Domain::kSlots);

std::vector<i64> centered_values(const Plaintext& pt, u64 plain_modulus);

std::vector<double> decode(const Plaintext& pt, const SchemeParams& p);

// Δ^exponent as a double.
double scale_power(const SchemeParams& p, int exponent);

// Fixed-point helpers for single values.
i64 to_fixed(double v, const SchemeParams& p, int scale_exponent = 1);
double from_fixed(i64 v, const SchemeParams& p, int scale_exponent = 1);

}  // namespace hevfl
