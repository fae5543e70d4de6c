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

#include <random>
#include <span>
#include <vector>

#include "hevfl/modarith.hpp"

namespace hevfl::protocols {

// Additive shares mod t: first + second = v.
struct Shares {
  std::vector<u64> first;
  std::vector<u64> second;
};

// first is uniform, second = v - first.
Shares secret_share(std::span<const u64> v, u64 t, std::mt19937_64& rng);
std::vector<u64> reconstruct(const Shares& s, u64 t);

// Local division of a share by `divisor` (party 0 floors its share, party 1
// floors the complement). The shares then sum to v / divisor up to one unit,
// except with probability about |v| / t.
std::vector<u64> truncate_share(std::span<const u64> share, u64 divisor, int party, u64 t);

// Multiplication triple c = a * b handed out by an offline dealer.
struct TripleShare {
  std::vector<u64> a, b, c;
};

std::pair<TripleShare, TripleShare> deal_triples(std::size_t n, u64 t, std::mt19937_64& dealer);

// One party's half of a Beaver multiplication: opened d = x - a and e = y - b
// give z_i = c_i + d*b_i + e*a_i (+ d*e for party 0).
std::vector<u64> beaver_open_share(std::span<const u64> x, std::span<const u64> a, u64 t);
std::vector<u64> beaver_finish(int party, std::span<const u64> d, std::span<const u64> e, const TripleShare& tr,
                               u64 t);

}  // namespace hevfl::protocols
