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

#include <random>
#include <vector>

#include "doctest.h"
#include "hevfl/error.hpp"
#include "hevfl/simd/cost_model.hpp"
#include "hevfl/simd/metering.hpp"
#include "hevfl/simd/semantic_backend.hpp"

using namespace hevfl;

namespace {

std::vector<u64> rotl_oracle(const std::vector<u64>& x, std::size_t i) {
  std::vector<u64> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = x[(j + i) % x.size()];
  return out;
}

CiphertextHandle enc(const Backend& be, std::vector<i64> v, int exp = 0) {
  return be.encrypt(encode_integers(v, be.params(), exp));
}

std::vector<i64> dec(const Backend& be, const CiphertextHandle& c) {
  return centered_values(be.decrypt(c), be.params().plain_modulus);
}

}  // namespace

TEST_CASE("encode places scaled values and zero-fills") {
  SchemeParams p = semantic_params(4, (1ULL << 20) + 7, 1ULL << 10);
  std::vector<double> v{1.5};
  Plaintext pt = encode(v, p);
  CHECK(pt.values == std::vector<u64>{1536, 0, 0, 0});
  CHECK(pt.scale_exponent == 1);

  Plaintext empty = encode(std::vector<double>{}, p);
  CHECK(empty.values == std::vector<u64>(4, 0));

  std::vector<double> two{3.0, -2.0};
  Plaintext pt2 = encode(two, p);
  CHECK(pt2.values[0] == 3072);
  CHECK(pt2.values[1] == p.plain_modulus - 2048);
  CHECK(pt2.values[2] == 0);
}

TEST_CASE("encode rejects long vectors and overflow") {
  SchemeParams p = semantic_params(4, (1ULL << 20) + 7, 1ULL << 10);
  std::vector<double> five(5, 1.0);
  CHECK_THROWS_AS(encode(five, p), Error);
  try {
    encode(five, p);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kVectorTooLong);
  }
  std::vector<double> big{600.0};  // 600 * 1024 > t/2
  try {
    encode(big, p);
    FAIL("expected overflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kOverflowAtScale);
  }
}

TEST_CASE("add, mult and level bookkeeping") {
  SemanticBackend be(semantic_params(4, 1099511627689ULL, 1 << 10, 1));
  auto a = enc(be, {1, 2, 0, 0});
  auto b = enc(be, {3, 4, 0, 0});
  CHECK(dec(be, be.add(a, b)) == std::vector<i64>{4, 6, 0, 0});
  CHECK(dec(be, be.add(a, enc(be, {0, 0, 0, 0}))) == dec(be, a));

  auto c = enc(be, {4, 5, 0, 0});
  auto prod = be.mult_plain(encode_integers(std::vector<i64>{2, 3}, be.params()), c);
  CHECK(dec(be, prod) == std::vector<i64>{8, 15, 0, 0});
  CHECK(prod.level == 0);
  try {
    be.mult_plain(encode_integers(std::vector<i64>{2, 3}, be.params()), prod);
    FAIL("expected LevelExhausted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kLevelExhausted);
  }
  // Rotations and additions leave the level alone.
  CHECK(be.rotate(prod, 1).level == 0);
  CHECK(be.add(prod, prod).level == 0);
  CHECK(be.add(prod, a).level == 0);
}

TEST_CASE("scale and slot checks") {
  SemanticBackend be(semantic_params(4));
  SemanticBackend other(semantic_params(8));
  auto a = enc(be, {1, 2, 3, 4}, 1);
  auto b = enc(be, {1, 2, 3, 4}, 2);
  try {
    be.add(a, b);
    FAIL("expected ScaleMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kScaleMismatch);
  }
  auto w = other.encrypt(encode_integers(std::vector<i64>{1}, other.params()));
  CHECK_THROWS_AS(be.add(a, w), Error);

  auto p = be.mult_plain(encode(std::vector<double>{1.0}, be.params()), a);
  CHECK(p.scale_exponent == 2);
}

TEST_CASE("diagonal product on the 2x4 worked operand") {
  SemanticBackend be(semantic_params(4));
  // A0=1 A1=2 B0=3 B1=4 C0=5 C1=6 D0=7 D1=8, M0=10 M1=100.
  auto y = enc(be, {10, 100, 10, 100});
  auto prod = be.mult_plain(encode_integers(std::vector<i64>{1, 4, 5, 8}, be.params()), y);
  CHECK(dec(be, prod) == std::vector<i64>{10, 400, 50, 800});
}

TEST_CASE("rotation convention") {
  SemanticBackend be(semantic_params(4));
  auto c = enc(be, {1, 2, 3, 4});
  CHECK(dec(be, be.rotate(c, 1)) == std::vector<i64>{2, 3, 4, 1});
  CHECK(dec(be, be.rotate(c, 1, RotationDirection::kRight)) == std::vector<i64>{4, 1, 2, 3});
  CHECK(dec(be, be.rotate(c, 0)) == std::vector<i64>{1, 2, 3, 4});
  try {
    be.rotate(c, 4);
    FAIL("expected OffsetOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kOffsetOutOfRange);
  }
}

TEST_CASE("hoisted rotation equals single rotations, exhaustive at N'=8") {
  SemanticBackend be(semantic_params(8));
  std::vector<i64> v{5, -1, 7, 2, 0, 9, -3, 4};
  auto c = enc(be, v);
  std::vector<u64> raw = be.decrypt(c).values;
  for (std::size_t k = 0; k < 8; ++k) {
    std::vector<std::size_t> offs{k};
    auto h = be.hoisted_rotate(c, offs);
    REQUIRE(h.size() == 1);
    CHECK(be.decrypt(h[0]).values == be.decrypt(be.rotate(c, k)).values);
    CHECK(be.decrypt(h[0]).values == rotl_oracle(raw, k));
  }
  MeasureScope scope;
  auto none = be.hoisted_rotate(c, std::vector<std::size_t>{});
  CHECK(none.empty());
  CHECK(scope.measure().ops == OpCounter{});
  std::vector<std::size_t> offs{1, 2, 3};
  auto three = be.hoisted_rotate(c, offs);
  CHECK(scope.measure().ops == OpCounter{.hst_rot = 3});
  CHECK(be.decrypt(three[2]).values == rotl_oracle(raw, 3));
  std::vector<std::size_t> dup{1, 1};
  CHECK_THROWS_AS(be.hoisted_rotate(c, dup), Error);
}

TEST_CASE("measure scopes nest additively") {
  SemanticBackend be(semantic_params(4));
  auto c = enc(be, {1, 2, 3, 4});
  MeasureScope outer;
  {
    MeasureScope inner;
    CHECK(inner.measure().ops == OpCounter{});
    be.add(c, c);
    be.rotate(c, 1);
    CHECK(inner.measure().ops == OpCounter{.add = 1, .rot = 1});
  }
  be.mult_plain(encode_integers(std::vector<i64>{1}, be.params()), c);
  CHECK(outer.measure().ops == OpCounter{.add = 1, .mult = 1, .rot = 1});

  MeasureScope moved_from;
  MeasureScope taken(std::move(moved_from));
  try {
    (void)moved_from.measure();
    FAIL("expected ScopeNotOpen");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kScopeNotOpen);
  }
  CHECK(taken.is_open());
}

TEST_CASE("innermost measurement without scope") {
  try {
    (void)innermost_measurement();
    FAIL("expected ScopeNotOpen");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kScopeNotOpen);
  }
}

TEST_CASE("semantic backend homomorphism on random programs") {
  std::mt19937_64 rng(7);
  SemanticBackend be(semantic_params(16, 1099511627689ULL, 1 << 10, 3));
  const u64 t = be.params().plain_modulus;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<u64> clear(16);
    for (auto& v : clear) v = rng() % t;
    auto c = be.encrypt(from_residues(clear, be.params(), 0));
    int mults = 0;
    for (int step = 0; step < 12; ++step) {
      int op = static_cast<int>(rng() % 4);
      if (op == 0) {
        std::size_t k = rng() % 16;
        c = be.rotate(c, k, RotationDirection::kRight);
        std::vector<u64> r(16);
        for (std::size_t j = 0; j < 16; ++j) r[j] = clear[(j + 16 - k) % 16];
        clear = r;
      } else if (op == 1 && mults < 3) {
        std::vector<u64> p(16);
        for (auto& v : p) v = rng() % t;
        c = be.mult_plain(from_residues(p, be.params(), 0), c);
        for (std::size_t j = 0; j < 16; ++j) clear[j] = mul_mod(clear[j], p[j], t);
        ++mults;
      } else if (op == 2) {
        std::vector<u64> p(16);
        for (auto& v : p) v = rng() % t;
        c = be.add_plain(c, from_residues(p, be.params(), 0));
        for (std::size_t j = 0; j < 16; ++j) clear[j] = add_mod(clear[j], p[j], t);
      } else {
        std::size_t k = rng() % 16;
        c = be.add(c, be.rotate(c, k));
        clear = [&] {
          auto r = rotl_oracle(clear, k);
          for (std::size_t j = 0; j < 16; ++j) r[j] = add_mod(r[j], clear[j], t);
          return r;
        }();
      }
    }
    REQUIRE(be.decrypt(c).values == clear);
  }
}

TEST_CASE("coefficient domain multiplication is negacyclic") {
  SemanticBackend be(semantic_params(4));
  // X * X^3 = X^4 = -1
  auto c = be.encrypt(encode_integers(std::vector<i64>{0, 0, 0, 1}, be.params(), 0, Domain::kCoefficients));
  auto p = encode_integers(std::vector<i64>{0, 1, 0, 0}, be.params(), 0, Domain::kCoefficients);
  CHECK(dec(be, be.mult_plain(p, c)) == std::vector<i64>{-1, 0, 0, 0});
}

TEST_CASE("cost model") {
  CostModel m;
  CHECK_NOTHROW(m.validate());
  CHECK(m.rlwe_ct_bytes() == 2ULL * 8192 * 16);
  CHECK(m.lwe_ct_bytes() == 8193ULL * 16);
  // m LWE ciphertexts weigh m(N+1)/(2N) RLWE ciphertexts.
  for (std::uint64_t rows : {1ULL, 4ULL, 100ULL}) {
    CHECK(rows * m.lwe_ct_bytes() * 2 * m.ring_degree == rows * (m.ring_degree + 1) * m.rlwe_ct_bytes());
  }
  CHECK(m.cost(OpCounter{1, 1, 1, 1}) == doctest::Approx(43.0));

  CostModel parsed = CostModel::parse(R"({"cost_rot": 50, "N": 4096, "log_q": 156})");
  CHECK(parsed.cost_rot == 50.0);
  CHECK(parsed.ring_degree == 4096);
  CHECK(parsed.rlwe_ct_bytes() == 2ULL * 4096 * 20);
  try {
    CostModel::parse(R"({"cost_rot": 5, "cost_hst_rot": 10})");
    FAIL("expected ConfigInvalid");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfigInvalid);
  }
}
