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
#include "hevfl/matmult/encode.hpp"
#include "hevfl/matmult/matmult.hpp"
#include "hevfl/matmult/transpose.hpp"
#include "hevfl/rlwe/rlwe_backend.hpp"
#include "hevfl/simd/semantic_backend.hpp"
#include "matmult_oracles.hpp"

using namespace hevfl;
using namespace hevfl::matmult;
namespace mm = hevfl::matmult;
using oracle::IMat;
using oracle::IVec;

namespace {

// Worked 2x4 operand: A0=1 A1=2 B0=3 B1=4 C0=5 C1=6 D0=7 D1=8; M0=10 M1=100.
IMat fig_matrix() {
  IMat x(4, 2);
  x << 1, 2, 3, 4, 5, 6, 7, 8;
  return x;
}

std::vector<i64> slots_of(const Plaintext& p, u64 t) { return centered_values(p, t); }

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::kConfigInvalid;
}

struct RunResult {
  std::vector<i64> values;
  OpCounter ops;
};

RunResult run(const Backend& be, Method method, const IMat& x, const IVec& y, MatMultOptions opt = {}) {
  const u64 t = be.params().plain_modulus;
  auto enc = encode_for(method, x, be.params());
  auto cy = encrypt_vector_for(be, enc, y);
  MeasureScope scope;
  if (method == Method::kCheetah) {
    auto lwes = matmult_cheetah(be, enc, cy);
    RunResult r{{}, scope.measure().ops};
    for (auto& l : lwes) r.values.push_back(centered(be.decrypt_lwe(l), t));
    return r;
  }
  auto pending = mm::matmult(be, method, enc, cy, opt);
  RunResult r{{}, scope.measure().ops};
  r.values = oracle::centered_all(reveal(be, pending), t);
  return r;
}

}  // namespace

TEST_CASE("diagonal encoders on the running example") {
  const SchemeParams p = semantic_params(4);
  const u64 t = p.plain_modulus;
  auto pv = encode_packvfl_diagonal(fig_matrix(), p);
  REQUIRE(pv.diagonals().size() == 2);
  CHECK(slots_of(pv.diagonals()[0], t) == std::vector<i64>{1, 4, 5, 8});  // A0 B1 C0 D1
  CHECK(slots_of(pv.diagonals()[1], t) == std::vector<i64>{2, 3, 6, 7});  // A1 B0 C1 D0

  auto gala = encode_gala_diagonal(fig_matrix(), p);
  CHECK(slots_of(gala.diagonals()[0], t) == std::vector<i64>{1, 4, 5, 8});
  CHECK(slots_of(gala.diagonals()[1], t) == std::vector<i64>{3, 6, 7, 2});  // B0 C1 D0 A1

  auto rows = encode_row_order(fig_matrix(), p);
  CHECK(rows.diagonals().size() == 4);
  CHECK(slots_of(rows.diagonals()[0], t) == std::vector<i64>{1, 2, 0, 0});
  auto cols = encode_column_order(fig_matrix(), p);
  CHECK(cols.diagonals().size() == 2);
  CHECK(slots_of(cols.diagonals()[0], t) == std::vector<i64>{1, 3, 5, 7});

  IMat one(1, 1);
  one << 9;
  for (auto& e : {encode_packvfl_diagonal(one, p), encode_gala_diagonal(one, p), encode_row_order(one, p),
                  encode_column_order(one, p)}) {
    REQUIRE(e.diagonals().size() == 1);
    CHECK(slots_of(e.diagonals()[0], t)[0] == 9);
  }
}

TEST_CASE("GALA diagonal of a square 2x2 follows the figure's rule") {
  const SchemeParams p = semantic_params(2);
  IMat x(2, 2);
  x << 1, 2, 3, 4;  // [[a, b], [c, d]]
  auto e = encode_gala_diagonal(x, p);
  CHECK(slots_of(e.diagonals()[0], p.plain_modulus) == std::vector<i64>{1, 4});  // [a, d]
  // e_1[j] = X[(1 + j) mod 2, j]: [c, b]
  CHECK(slots_of(e.diagonals()[1], p.plain_modulus) == std::vector<i64>{3, 2});
}

TEST_CASE("encoders reject oversized operands") {
  const SchemeParams p = semantic_params(4);
  IMat big = IMat::Ones(8, 2);
  CHECK(code_of([&] { encode_packvfl_diagonal(big, p); }) == ErrorCode::kOperandTooLarge);
  CHECK(code_of([&] { encode_gala_diagonal(big, p); }) == ErrorCode::kOperandTooLarge);
  CHECK(code_of([&] { encode_row_order(big, p); }) == ErrorCode::kOperandTooLarge);
  CHECK(code_of([&] { encode_column_order(big, p); }) == ErrorCode::kOperandTooLarge);
  CHECK(code_of([&] { encode_for(Method::kCheetah, IMat::Ones(4, 2), p); }) == ErrorCode::kMatrixTooLarge);
  CHECK_NOTHROW(encode_for(Method::kPackVfl, big, p));
}

TEST_CASE("input packing") {
  const SchemeParams p = semantic_params(8);
  const u64 t = p.plain_modulus;
  IMat x(4, 4);
  x << 0, 1, 2, 3, 10, 11, 12, 13, 20, 21, 22, 23, 30, 31, 32, 33;  // X[i,j] = 10i + j
  auto e = input_pack(x, p);
  CHECK(e.packed);
  REQUIRE(e.diagonals().size() == 2);
  // Section s holds rows 2s and 2s+1; diagonals wrap inside each 4-wide section.
  CHECK(slots_of(e.diagonals()[0], t) == std::vector<i64>{0, 11, 2, 13, 20, 31, 22, 33});
  CHECK(slots_of(e.diagonals()[1], t) == std::vector<i64>{1, 12, 3, 10, 21, 32, 23, 30});

  IMat row(1, 8);
  row << 1, 2, 3, 4, 5, 6, 7, 8;
  auto r = input_pack(row, p);
  REQUIRE(r.diagonals().size() == 1);
  CHECK(slots_of(r.diagonals()[0], t) == std::vector<i64>{1, 2, 3, 4, 5, 6, 7, 8});

  IMat full = IMat::Ones(8, 8);
  CHECK(code_of([&] { input_pack(full, p); }) == ErrorCode::kPackingNotApplicable);

  SemanticBackend be(p);
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    IMat a = oracle::random_matrix(rng, 4, 2, 50);
    IVec y = oracle::random_vector(rng, 2, 50);
    CHECK(run(be, Method::kPackVfl, a, y).values == oracle::matvec(a, y));
  }
}

TEST_CASE("partition plans") {
  auto a = plan_partition(8, 2, 4);
  CHECK(a.kind == PartitionCase::kTall);
  CHECK(a.row_blocks == 2);
  CHECK(a.col_blocks == 1);
  auto b = plan_partition(4, 16, 8);
  CHECK(b.kind == PartitionCase::kWide);
  CHECK(b.row_blocks == 1);
  CHECK(b.col_blocks == 2);
  auto c = plan_partition(32, 16, 8);
  CHECK(c.kind == PartitionCase::kGrid);
  CHECK(c.row_blocks * c.block_rows == 32);
  CHECK(c.col_blocks * c.block_cols == 16);
  CHECK(code_of([] { plan_partition(8, 8, 8); }) == ErrorCode::kNotRequired);
}

TEST_CASE("packvfl on the worked 2x4 operand") {
  SemanticBackend be(semantic_params(4));
  IVec y(2);
  y << 10, 100;
  auto r = run(be, Method::kPackVflDiagonal, fig_matrix(), y);
  CHECK(r.values == std::vector<i64>{210, 430, 650, 870});
  CHECK(r.ops == OpCounter{.add = 1, .mult = 2, .rot = 0, .hst_rot = 1});
}

TEST_CASE("naive counts on the running example") {
  SemanticBackend be(semantic_params(4));
  IVec y(2);
  y << 10, 100;
  auto r = run(be, Method::kNaive, fig_matrix(), y);
  CHECK(r.values == std::vector<i64>{210, 430, 650, 870});
  CHECK(r.ops == OpCounter{7, 8, 7, 0});
  MeasureScope two;
  run(be, Method::kNaive, fig_matrix(), y);
  run(be, Method::kNaive, fig_matrix(), y);
  CHECK(two.measure().ops == OpCounter{14, 16, 14, 0});
}

TEST_CASE("identity matrix returns y for every method") {
  SemanticBackend be(semantic_params(16));
  IMat id = IMat::Identity(4, 4);
  IVec y(4);
  y << 3, -1, 4, 1;
  for (Method m : all_methods()) {
    CAPTURE(to_string(m));
    CHECK(run(be, m, id, y).values == std::vector<i64>{3, -1, 4, 1});
  }
}

TEST_CASE("every method agrees with the brute-force product on random shapes") {
  std::mt19937_64 rng(17);
  SemanticBackend be(semantic_params(16, 1099511627689ULL, 1 << 10, 2));
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 1 + rng() % 16, n = 1 + rng() % 16;
    IMat x = oracle::random_matrix(rng, m, n, 1000);
    IVec y = oracle::random_vector(rng, n, 1000);
    const auto expect = oracle::matvec(x, y);
    for (Method method : all_methods()) {
      if (!method_supports(method, m, n, 16, 16)) continue;
      CAPTURE(to_string(method));
      CAPTURE(m);
      CAPTURE(n);
      REQUIRE(run(be, method, x, y).values == expect);
    }
  }
}

TEST_CASE("measured counts equal the closed forms on the power-of-two grid") {
  std::mt19937_64 rng(23);
  for (std::size_t slots : {8, 64}) {
    SemanticBackend be(semantic_params(slots));
    for (std::size_t m = 1; m <= 64; m *= 2) {
      for (std::size_t n = 1; n <= 64; n *= 2) {
        IMat x = oracle::random_matrix(rng, m, n, 9);
        IVec y = oracle::random_vector(rng, n, 9);
        for (Method method : all_methods()) {
          if (!method_supports(method, m, n, slots, slots)) continue;
          CAPTURE(to_string(method));
          CAPTURE(m);
          CAPTURE(n);
          CAPTURE(slots);
          auto r = run(be, method, x, y);
          REQUIRE(r.values == oracle::matvec(x, y));
          auto pred = predict_complexity(method, m, n, slots);
          if (method == Method::kPackVfl && m > slots && n > slots) {
            // The large-operand table lists mn/N' - 1 additions here, one ciphertext
            // per row block makes mn/N' - m/N' the exact count.
            CHECK(r.ops.add == m * n / slots - m / slots);
            pred.ops.add = r.ops.add;
          }
          CHECK(r.ops == pred.ops);
        }
      }
    }
  }
}

TEST_CASE("predictor examples") {
  CHECK(predict_complexity(Method::kNaive, 4, 2, 8).ops == OpCounter{7, 8, 7, 0});
  CHECK(predict_complexity(Method::kPackVflDiagonal, 4, 2, 8).ops == OpCounter{1, 2, 0, 1});
  auto wide = predict_complexity(Method::kPackVfl, 4, 16, 8);
  CHECK(wide.ops == OpCounter{7, 8, 0, 6});
  CHECK(wide.ct_b_to_a == 2);
  CHECK(wide.ct_a_to_b == 1);
  auto ch = predict_complexity(Method::kCheetah, 4, 2, 8);
  CHECK(ch.ct_a_to_b == 4);
  CHECK(ch.result_kind == CtKind::kLwe);
  CHECK(predict_complexity(Method::kColumn, 4, 2, 8).ct_b_to_a == 2);
}

TEST_CASE("packvfl large operands") {
  SemanticBackend be(semantic_params(8));
  std::mt19937_64 rng(31);
  {
    IMat x = oracle::random_matrix(rng, 4, 16, 20);
    IVec y = oracle::random_vector(rng, 16, 20);
    auto enc = encode_for(Method::kPackVfl, x, be.params());
    auto cy = encrypt_vector_for(be, enc, y);
    CHECK(cy.cts.size() == 2);
    MeasureScope s;
    auto res = mm::matmult(be, Method::kPackVfl, enc, cy);
    CHECK(s.measure().ops == OpCounter{7, 8, 0, 6});
    CHECK(res.ciphertexts.size() == 1);
    CHECK(oracle::centered_all(reveal(be, res), be.params().plain_modulus) == oracle::matvec(x, y));
  }
  {
    IMat x = oracle::random_matrix(rng, 16, 2, 20);
    IVec y = oracle::random_vector(rng, 2, 20);
    auto enc = encode_for(Method::kPackVfl, x, be.params());
    auto cy = encrypt_vector_for(be, enc, y);
    MeasureScope s;
    auto res = mm::matmult(be, Method::kPackVfl, enc, cy);
    CHECK(s.measure().ops == predict_complexity(Method::kPackVfl, 16, 2, 8).ops);
    CHECK(res.ciphertexts.size() == 2);
    CHECK(oracle::centered_all(reveal(be, res), be.params().plain_modulus) == oracle::matvec(x, y));
  }
}

TEST_CASE("wrong method or layout is rejected") {
  SemanticBackend be(semantic_params(4));
  IVec y(2);
  y << 1, 2;
  auto enc = encode_for(Method::kGala, fig_matrix(), be.params());
  auto cy = encrypt_vector_for(be, enc, y);
  CHECK(code_of([&] { mm::matmult(be, Method::kPackVfl, enc, cy); }) == ErrorCode::kEncodingMismatch);
  auto plain = encrypt_vector(be, y, VectorLayout{VectorKind::kPlain, 2, 0, 1});
  CHECK(code_of([&] { mm::matmult(be, Method::kGala, enc, plain); }) == ErrorCode::kReplicationMismatch);
}

TEST_CASE("lazy and eager RaS agree") {
  SemanticBackend be(semantic_params(16));
  std::mt19937_64 rng(41);
  for (std::size_t m : {1, 2, 4}) {
    for (std::size_t n : {4, 8, 16}) {
      IMat x = oracle::random_matrix(rng, m, n, 100);
      IVec y = oracle::random_vector(rng, n, 100);
      auto eager = run(be, Method::kPackVflDiagonal, x, y);
      auto lazy = run(be, Method::kPackVflDiagonal, x, y, MatMultOptions{.lazy = true});
      CHECK(eager.values == lazy.values);
      CHECK(lazy.ops.rot == 0);
      CHECK(eager.ops.rot == (m < n ? log2_exact(n / m) : 0));
    }
  }
}

TEST_CASE("finalize_lazy_ras") {
  // Slots of the worked example with A = 1, B = 2 coefficients and M_k = 10^k style tags.
  const u64 t = 1099511627689ULL;
  std::vector<std::vector<u64>> dec{{11, 22, 33, 44}};
  ReductionPlan plan{{SlotRef{0, 0}, SlotRef{0, 2}}, {SlotRef{0, 1}, SlotRef{0, 3}}};
  CHECK(finalize_lazy_ras(dec, plan, t) == std::vector<u64>{44, 66});
  CHECK(finalize_lazy_ras(dec, identity_plan(4), t) == std::vector<u64>{11, 22, 33, 44});
  ReductionPlan bad{{SlotRef{1, 0}}};
  CHECK(code_of([&] { finalize_lazy_ras(dec, bad, t); }) == ErrorCode::kPlanMismatch);
  ReductionPlan oob{{SlotRef{0, 9}}};
  CHECK(code_of([&] { finalize_lazy_ras(dec, oob, t); }) == ErrorCode::kPlanMismatch);
}

TEST_CASE("lazy plan of the 2x4 worked example") {
  // X = [[A0..A3], [B0..B3]], N' = 4, y = [M0..M3] repeated.
  SemanticBackend be(semantic_params(4));
  IMat x(2, 4);
  x << 1, 2, 3, 4, 5, 6, 7, 8;
  IVec y(4);
  y << 1000, 100, 10, 1;
  auto enc = encode_for(Method::kPackVflDiagonal, x, be.params());
  auto cy = encrypt_vector_for(be, enc, y);
  auto res = mm::matmult(be, Method::kPackVflDiagonal, enc, cy, MatMultOptions{.lazy = true});
  CHECK(res.lazy);
  auto slots = oracle::centered_all(be.decrypt(res.ciphertexts[0]).values, be.params().plain_modulus);
  // slot0 = A0M0 + A1M1, slot1 = B1M1 + B2M2, slot2 = A2M2 + A3M3, slot3 = B3M3 + B0M0
  CHECK(slots[0] == 1000 + 200);
  CHECK(slots[1] == 600 + 70);
  CHECK(slots[2] == 30 + 4);
  CHECK(slots[3] == 8 + 5000);
  CHECK(res.plan[0] == std::vector<SlotRef>{{0, 0}, {0, 2}});
  CHECK(res.plan[1] == std::vector<SlotRef>{{0, 1}, {0, 3}});
}

TEST_CASE("inverse RaS") {
  const u64 t = 1099511627689ULL;
  std::mt19937_64 rng(2);
  std::vector<u64> v{5, 7};
  auto one = inverse_ras_cleartext(v, 1, 8, t, rng);
  REQUIRE(one.size() == 4);
  CHECK(add_mod(one[0], one[2], t) == 5);
  CHECK(add_mod(one[1], one[3], t) == 7);
  CHECK(inverse_ras_cleartext(v, 0, 8, t, rng) == v);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<u64> w(1 + rng() % 4);
    for (auto& x : w) x = rng() % t;
    const std::size_t len = w.size();
    const int max_rounds = log2_exact(16 / next_power_of_two(len));
    for (int r = 0; r <= max_rounds; ++r) {
      if ((len << r) > 16) continue;
      auto split = inverse_ras_cleartext(w, r, 16, t, rng);
      CHECK(finalize_lazy_ras({split}, ras_plan(len, r), t) == w);
    }
  }
  CHECK(code_of([&] { inverse_ras_cleartext(v, 3, 8, t, rng); }) == ErrorCode::kCapacityExceeded);
}

TEST_CASE("align_to_plan reconstructs through any packed plan") {
  const u64 t = 1099511627689ULL;
  std::mt19937_64 rng(12);
  auto plan = packed_plan(4, 4, 2, 8);
  std::vector<u64> v{1, 2, 3, 4};
  auto s = align_to_plan(v, plan, 8, t, rng);
  CHECK(finalize_lazy_ras({s}, plan, t) == v);
}

TEST_CASE("transposed diagonal conversion") {
  std::mt19937_64 rng(19);
  SemanticBackend be(semantic_params(16));
  const u64 t = be.params().plain_modulus;
  for (std::size_t m : {1, 2, 4, 8, 16}) {
    for (std::size_t n : {1, 2, 4, 8, 16}) {
      IMat x = oracle::random_matrix(rng, m, n, 99);
      auto enc = encrypt_diagonals(be, x);
      MeasureScope s;
      auto conv = transpose_diag_convert(be, enc);
      CHECK(s.measure().ops.rot == std::min(m, n) - 1);
      CHECK(s.measure().ops.rot <= std::min(m, n));
      IMat xt = x.transpose();
      auto direct = encode_packvfl_diagonal(xt, be.params());
      REQUIRE(conv.cts.size() == direct.diagonals().size());
      for (std::size_t i = 0; i < conv.cts.size(); ++i) {
        CAPTURE(m);
        CAPTURE(n);
        CAPTURE(i);
        CHECK(be.decrypt(conv.cts[i]).values == direct.diagonals()[i].values);
      }
      (void)t;
    }
  }
}

TEST_CASE("conversion example m=4, n=2") {
  SemanticBackend be(semantic_params(4));
  auto table = transpose_offset_table(4, 2);
  REQUIRE(table.size() == 2);
  CHECK(table[1] == TransposeStep{1, 1, 3});
  auto enc = encrypt_diagonals(be, fig_matrix());
  auto conv = transpose_diag_convert(be, enc);
  CHECK(centered_values(be.decrypt(conv.cts[1]), be.params().plain_modulus) == std::vector<i64>{3, 6, 7, 2});

  IMat row(1, 4);
  row << 1, 2, 3, 4;
  MeasureScope s;
  auto vec = transpose_diag_convert(be, encrypt_diagonals(be, row));
  CHECK(s.measure().ops == OpCounter{});
  CHECK(vec.rows == 4);

  EncryptedDiagonals packed = enc;
  packed.packed = true;
  CHECK(code_of([&] { transpose_diag_convert(be, packed); }) == ErrorCode::kLayoutUnsupported);
}

TEST_CASE("encrypted-matrix product records no rotations") {
  std::mt19937_64 rng(29);
  SemanticBackend be(semantic_params(16));
  const u64 t = be.params().plain_modulus;
  for (std::size_t m : {2, 4, 8}) {
    for (std::size_t n : {2, 4, 8}) {
      IMat x = oracle::random_matrix(rng, m, n, 50);
      IVec w = oracle::random_vector(rng, n, 50);
      auto enc = encrypt_diagonals(be, x);
      std::vector<u64> wr;
      for (Eigen::Index i = 0; i < w.size(); ++i) wr.push_back(reduce_signed(w[i], t));
      MeasureScope s;
      auto res = matmult_cipher_matrix(be, enc, wr, 0);
      auto ops = s.measure().ops;
      CHECK(ops.rot == 0);
      CHECK(ops.hst_rot == 0);
      CHECK(ops.mult == std::min(m, n));
      CHECK(oracle::centered_all(reveal(be, res), t) == oracle::matvec(x, w));
    }
  }
}

TEST_CASE("all methods are exact on the lattice backend at N=1024") {
  std::vector<std::size_t> offsets;
  for (std::size_t i = 1; i <= 16; ++i) offsets.push_back(i);
  for (std::size_t i = 512 - 16; i < 512; ++i) offsets.push_back(i);
  rlwe::RlweBackend be(rlwe::rlwe_params(1024, 786433), rlwe::RlweOptions{offsets, 77});
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t m = std::size_t{1} << (rng() % 5), n = std::size_t{1} << (rng() % 5);
    IMat x = oracle::random_matrix(rng, m, n, 30);
    IVec y = oracle::random_vector(rng, n, 30);
    for (Method method : all_methods()) {
      if (!method_supports(method, m, n, 512, 1024)) continue;
      CAPTURE(to_string(method));
      REQUIRE(run(be, method, x, y).values == oracle::matvec(x, y));
    }
  }
}
