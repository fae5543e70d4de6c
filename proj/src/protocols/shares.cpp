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

#include "hevfl/protocols/shares.hpp"

#include "hevfl/error.hpp"
#include "hevfl/protocols/common.hpp"

namespace hevfl::protocols {

Shares secret_share(std::span<const u64> v, u64 t, std::mt19937_64& rng) {
  Shares s;
  s.first = uniform_vector(v.size(), t, rng);
  s.second.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) s.second[i] = sub_mod(v[i] % t, s.first[i], t);
  return s;
}

std::vector<u64> reconstruct(const Shares& s, u64 t) {
  if (s.first.size() != s.second.size()) throw Error(ErrorCode::kShapeMismatch, "share lengths differ");
  std::vector<u64> out(s.first.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = add_mod(s.first[i], s.second[i], t);
  return out;
}

std::vector<u64> truncate_share(std::span<const u64> share, u64 divisor, int party, u64 t) {
  std::vector<u64> out(share.size());
  for (std::size_t i = 0; i < share.size(); ++i) {
    out[i] = party == 0 ? share[i] / divisor : neg_mod((t - share[i]) % t / divisor, t);
  }
  return out;
}

std::pair<TripleShare, TripleShare> deal_triples(std::size_t n, u64 t, std::mt19937_64& dealer) {
  const auto a = uniform_vector(n, t, dealer);
  const auto b = uniform_vector(n, t, dealer);
  std::vector<u64> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = mul_mod(a[i], b[i], t);
  const Shares sa = secret_share(a, t, dealer), sb = secret_share(b, t, dealer), sc = secret_share(c, t, dealer);
  return {TripleShare{sa.first, sb.first, sc.first}, TripleShare{sa.second, sb.second, sc.second}};
}

std::vector<u64> beaver_open_share(std::span<const u64> x, std::span<const u64> a, u64 t) {
  if (x.size() != a.size()) throw Error(ErrorCode::kShapeMismatch, "triple length differs from operand");
  std::vector<u64> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = sub_mod(x[i], a[i], t);
  return out;
}

std::vector<u64> beaver_finish(int party, std::span<const u64> d, std::span<const u64> e, const TripleShare& tr,
                               u64 t) {
  std::vector<u64> z(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    u64 v = add_mod(tr.c[i], add_mod(mul_mod(d[i], tr.b[i], t), mul_mod(e[i], tr.a[i], t), t), t);
    if (party == 0) v = add_mod(v, mul_mod(d[i], e[i], t), t);
    z[i] = v;
  }
  return z;
}

}  // namespace hevfl::protocols
