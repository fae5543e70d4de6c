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

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "hevfl/error.hpp"
#include "hevfl/matmult/encode.hpp"
#include "hevfl/matmult/matmult.hpp"
#include "hevfl/presets.hpp"
#include "hevfl/protocols/caesar.hpp"
#include "hevfl/protocols/linr.hpp"
#include "hevfl/protocols/nn.hpp"
#include "hevfl/protocols/shares.hpp"
#include "hevfl/simd/semantic_backend.hpp"
#include "hevfl/training.hpp"

using namespace hevfl;
using namespace hevfl::protocols;

namespace {

constexpr double kTol = 1.0 / 256.0;  // 2^-8 absolute

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::kConfigInvalid;
}

SchemeParams params(std::size_t slots, int levels = 2) {
  return semantic_params(slots, kProtocolPlainModulus, kProtocolScale, levels, 122);
}

Mat uniform(Index rows, Index cols, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  Mat m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = d(rng);
  return m;
}

std::vector<Index> all_rows(Index n) {
  std::vector<Index> v(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

double max_abs(const Vec& a, const Vec& b) { return (a - b).cwiseAbs().maxCoeff(); }
double max_abs(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Fixed-point X times residues mod t, computed independently of the library helpers.
std::vector<u64> modular_matvec(const Mat& x, const std::vector<u64>& v, const SchemeParams& p) {
  const u64 t = p.plain_modulus;
  std::vector<u64> out(static_cast<std::size_t>(x.rows()));
  for (Index i = 0; i < x.rows(); ++i) {
    unsigned __int128 acc = 0;
    for (Index j = 0; j < x.cols(); ++j) {
      const i64 f = static_cast<i64>(std::llround(x(i, j) * static_cast<double>(p.scale)));
      const u64 r = f < 0 ? t - static_cast<u64>(-f) % t : static_cast<u64>(f) % t;
      acc = (acc + static_cast<unsigned __int128>(r) * v[static_cast<std::size_t>(j)]) % t;
    }
    out[static_cast<std::size_t>(i)] = static_cast<u64>(acc);
  }
  return out;
}

std::size_t count_records(const netsim::Transcript& t, const std::string& from, const std::string& label,
                          MessageKind kind, std::uint64_t* cts = nullptr) {
  std::size_t n = 0;
  for (const auto& r : t.records()) {
    if (r.sender == from && r.label == label && r.kind == kind) {
      ++n;
      if (cts) *cts += r.ct_count;
    }
  }
  return n;
}

std::size_t rlwe_messages(const netsim::Transcript& t, const std::string& from) {
  std::size_t n = 0;
  for (const auto& r : t.records()) n += r.sender == from && r.kind == MessageKind::kRlweCt;
  return n;
}

}  // namespace

TEST_CASE("secret sharing round-trips") {
  const u64 t = kProtocolPlainModulus;
  std::mt19937_64 rng(1);
  const Shares zero = secret_share(std::vector<u64>(8, 0), t, rng);
  CHECK(reconstruct(zero, t) == std::vector<u64>(8, 0));
  std::uniform_int_distribution<u64> dist(0, t - 1);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<u64> v(16);
    for (auto& x : v) x = dist(rng);
    const Shares s = secret_share(v, t, rng);
    REQUIRE(reconstruct(s, t) == v);
  }
}

TEST_CASE("share truncation is off by at most one unit") {
  const u64 t = kProtocolPlainModulus;
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<i64> dist(-(i64{1} << 40), i64{1} << 40);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<u64> v(8);
    std::vector<i64> raw(8);
    for (std::size_t i = 0; i < 8; ++i) {
      raw[i] = dist(rng);
      v[i] = reduce_signed(raw[i], t);
    }
    const Shares s = secret_share(v, t, rng);
    const auto r = reconstruct({truncate_share(s.first, 1 << 14, 0, t), truncate_share(s.second, 1 << 14, 1, t)}, t);
    for (std::size_t i = 0; i < 8; ++i) {
      const double expect = std::floor(static_cast<double>(raw[i]) / 16384.0);
      CHECK(std::abs(static_cast<double>(centered(r[i], t)) - expect) <= 1.0);
    }
  }
}

TEST_CASE("Beaver triples multiply shared values") {
  const u64 t = kProtocolPlainModulus;
  std::mt19937_64 rng(3), dealer(4);
  const std::vector<u64> x{reduce_signed(-7, t), 11, 0, 123456}, y{5, reduce_signed(-3, t), 9, 1000};
  const Shares sx = secret_share(x, t, rng), sy = secret_share(y, t, rng);
  const auto [ta, tb] = deal_triples(4, t, dealer);
  const auto da = beaver_open_share(sx.first, ta.a, t), db = beaver_open_share(sx.second, tb.a, t);
  const auto ea = beaver_open_share(sy.first, ta.b, t), eb = beaver_open_share(sy.second, tb.b, t);
  std::vector<u64> d(4), e(4);
  for (std::size_t i = 0; i < 4; ++i) {
    d[i] = add_mod(da[i], db[i], t);
    e[i] = add_mod(ea[i], eb[i], t);
  }
  const auto z = reconstruct({beaver_finish(0, d, e, ta, t), beaver_finish(1, d, e, tb, t)}, t);
  CHECK(centered(z[0], t) == -35);
  CHECK(centered(z[1], t) == -33);
  CHECK(z[2] == 0);
  CHECK(z[3] == 123456000);
}

TEST_CASE("VFL-LinR gradient matches the cleartext oracle") {
  const SchemeParams p = params(8);
  SemanticBackend arbiter(p);
  std::mt19937_64 rng(5);
  const Mat xa = uniform(4, 4, rng), xb = uniform(4, 4, rng);
  const Vec ta = uniform(4, 1, rng).col(0), tb = uniform(4, 1, rng).col(0), y = uniform(4, 1, rng).col(0);
  LinrParty a{"A", xa, ta, std::nullopt, std::mt19937_64(6)};
  LinrParty b{"B", xb, tb, y, std::mt19937_64(7)};
  netsim::Network net({}, {});
  const auto batch = all_rows(4);
  const auto st = vfl_linr_iteration(arbiter, net, a, b, batch, 0.5);

  const Vec resid = xa * ta + xb * tb - y;
  const Vec ga = xa.transpose() * resid / 4.0, gb = xb.transpose() * resid / 4.0;
  CHECK(max_abs(st.grad_a, ga) <= kTol);
  CHECK(max_abs(st.grad_b, gb) <= kTol);
  CHECK(max_abs(a.theta, ta - 0.5 * ga) <= kTol);
  CHECK(max_abs(b.theta, tb - 0.5 * gb) <= kTol);

  const auto predicted = matmult::predict_complexity(matmult::Method::kPackVfl, 4, 4, 8).ops;
  CHECK(st.matmult_a == predicted);
  CHECK(st.matmult_b == predicted);
  // The arbiter only decrypts.
  CHECK(st.arbiter.ops == OpCounter{});
}

TEST_CASE("VFL-LinR with zero data gives a zero gradient") {
  const SchemeParams p = params(8);
  SemanticBackend arbiter(p);
  LinrParty a{"A", Mat::Zero(4, 4), Vec::Zero(4), std::nullopt, std::mt19937_64(1)};
  LinrParty b{"B", Mat::Zero(4, 4), Vec::Zero(4), Vec::Zero(4), std::mt19937_64(2)};
  netsim::Network net({}, {});
  const auto batch = all_rows(4);
  const auto st = vfl_linr_iteration(arbiter, net, a, b, batch, 0.1);
  CHECK(st.grad_a.isZero());
  CHECK(st.grad_b.isZero());
}

TEST_CASE("VFL-LinR rejects mismatched shapes") {
  SemanticBackend arbiter(params(8));
  LinrParty a{"A", Mat::Zero(4, 4), Vec::Zero(3), std::nullopt, std::mt19937_64(1)};
  LinrParty b{"B", Mat::Zero(4, 4), Vec::Zero(4), Vec::Zero(4), std::mt19937_64(2)};
  netsim::Network net({}, {});
  const auto batch = all_rows(4);
  CHECK(code_of([&] { vfl_linr_iteration(arbiter, net, a, b, batch, 0.1); }) == ErrorCode::kShapeMismatch);
}

TEST_CASE("VFL-LinR on a tall batch partitions the transposed features") {
  // X^T is 4 x 16 with 8 slots: the wide large-operand case.
  const SchemeParams p = params(8);
  SemanticBackend arbiter(p);
  std::mt19937_64 rng(8);
  const Mat xa = uniform(16, 4, rng), xb = uniform(16, 4, rng);
  const Vec y = uniform(16, 1, rng).col(0);
  LinrParty a{"A", xa, Vec::Zero(4), std::nullopt, std::mt19937_64(1)};
  LinrParty b{"B", xb, Vec::Zero(4), y, std::mt19937_64(2)};
  netsim::Network net({}, {});
  const auto batch = all_rows(16);
  const auto st = vfl_linr_iteration(arbiter, net, a, b, batch, 0.1);
  CHECK(max_abs(st.grad_b, xb.transpose() * (-y) / 16.0) <= kTol);
  CHECK(st.matmult_b == matmult::predict_complexity(matmult::Method::kPackVfl, 4, 16, 8).ops);
}

TEST_CASE("CAESAR forward on the tall example reconstructs X_A <w_A>_2 exactly") {
  const SchemeParams p = params(4);
  SemanticBackend keys_a(p), keys_b(p);
  std::mt19937_64 rng(9);
  CaesarParty a{"A", uniform(8, 2, rng), std::nullopt, {}, {}, std::mt19937_64(10)};
  CaesarParty b{"B", uniform(8, 3, rng), Vec::Zero(8), {}, {}, std::mt19937_64(11)};
  netsim::Network net({}, {});
  const Vec wa = uniform(2, 1, rng).col(0), wb = uniform(3, 1, rng).col(0);
  caesar_share_weights(p, net, a, wa, b, wb);
  CHECK(max_abs(caesar_weights(p, a, b), wa) <= 1.0 / 16384);
  const auto batch = all_rows(8);
  const auto r = caesar_forward(keys_a, keys_b, net, a, b, batch);
  const u64 t = p.plain_modulus;
  CHECK(reconstruct(r.za_cross, t) == modular_matvec(a.x, b.peer_share, p));
  CHECK(reconstruct(r.zb_cross, t) == modular_matvec(b.x, a.peer_share, p));
  const Vec z = to_real(reconstruct(r.z, t), p, 1);
  CHECK(max_abs(z, a.x * wa + b.x * wb) <= kTol);
}

TEST_CASE("CAESAR forward with a zero share gives shares of zero") {
  const SchemeParams p = params(4);
  SemanticBackend keys_a(p), keys_b(p);
  std::mt19937_64 rng(12);
  CaesarParty a{"A", uniform(8, 2, rng), std::nullopt, {}, std::vector<u64>(2, 0), std::mt19937_64(1)};
  CaesarParty b{"B", uniform(8, 2, rng), Vec::Zero(8), {}, std::vector<u64>(2, 0), std::mt19937_64(2)};
  a.own_share = {5, 6};
  b.own_share = {7, 8};
  b.peer_share = {0, 0};  // <w_A>_2
  netsim::Network net({}, {});
  const auto batch = all_rows(8);
  const auto r = caesar_forward(keys_a, keys_b, net, a, b, batch);
  CHECK(reconstruct(r.za_cross, p.plain_modulus) == std::vector<u64>(8, 0));
}

TEST_CASE("CAESAR forward sends one aggregated ciphertext for two column blocks") {
  // X_A is 2 x 8 with 4 slots: two column blocks, one result ciphertext.
  const SchemeParams p = params(4);
  SemanticBackend keys_a(p), keys_b(p);
  std::mt19937_64 rng(13);
  CaesarParty a{"A", uniform(2, 8, rng), std::nullopt, {}, {}, std::mt19937_64(1)};
  CaesarParty b{"B", uniform(2, 2, rng), Vec::Zero(2), {}, {}, std::mt19937_64(2)};
  const CostModel sizes = cost_model_for(preset("paper-122"));
  netsim::Network net({}, sizes);
  caesar_share_weights(p, net, a, uniform(8, 1, rng).col(0), b, uniform(2, 1, rng).col(0));
  const auto batch = all_rows(2);
  const auto r = caesar_forward(keys_a, keys_b, net, a, b, batch);
  CHECK(reconstruct(r.za_cross, p.plain_modulus) == modular_matvec(a.x, b.peer_share, p));
  net.transcript().seal();
  std::uint64_t in = 0, out = 0;
  CHECK(count_records(net.transcript(), "B", "weight_share", MessageKind::kRlweCt, &in) == 1);
  CHECK(in == 2);
  CHECK(count_records(net.transcript(), "A", "masked_product", MessageKind::kRlweCt, &out) == 1);
  CHECK(out == 1);
  std::uint64_t bytes = 0;
  for (const auto& rec : net.transcript().records()) {
    if (rec.sender == "A" && rec.label == "masked_product") bytes += rec.bytes;
  }
  CHECK(bytes == sizes.rlwe_ct_bytes());
}

TEST_CASE("folded CAESAR gradient fits one level; the direct form needs two") {
  std::mt19937_64 rng(14);
  const Mat x = uniform(4, 3, rng);
  const Vec y = (uniform(4, 1, rng).array() > 0.0).cast<double>().matrix().col(0);
  const Vec z = uniform(4, 1, rng).col(0);
  const Vec z3 = z.array().cube().matrix();
  const SigmoidPoly q;

  SemanticBackend l1(params(8, 1));
  const auto layout = packvfl_layout(4, l1.params());
  auto zc = matmult::encrypt_vector(l1, z, layout, 1);
  auto z3c = matmult::encrypt_vector(l1, z3, layout, 1);
  const auto g = caesar_gradient_mlr(l1, zc, z3c, x, y, q, rng);
  CHECK(g.levels_consumed == 1);
  CHECK(code_of([&] { caesar_gradient_unreduced(l1, zc, z3c, x, y, q); }) == ErrorCode::kLevelExhausted);

  Vec e(4);
  for (Index i = 0; i < 4; ++i) e(i) = q.q0 + q.q1 * z(i) + q.q2 * z3(i) - y(i);
  const Vec oracle = x.transpose() * e;
  const Vec folded = to_real(matmult::reveal(l1, g.result), l1.params(), 2);
  CHECK(max_abs(folded, oracle) <= kTol);

  SemanticBackend l2(params(8, 2));
  zc = matmult::encrypt_vector(l2, z, layout, 1);
  z3c = matmult::encrypt_vector(l2, z3, layout, 1);
  const auto u = caesar_gradient_unreduced(l2, zc, z3c, x, y, q);
  CHECK(u.levels_consumed == 2);
  CHECK(max_abs(to_real(matmult::reveal(l2, u.result), l2.params(), 3), oracle) <= kTol);
}

TEST_CASE("CAESAR gradient with q1 = q2 = 0 is the cleartext term alone") {
  std::mt19937_64 rng(15);
  SemanticBackend be(params(8, 1));
  const Mat x = uniform(4, 2, rng);
  const Vec y = Vec::Ones(4);
  const auto layout = packvfl_layout(4, be.params());
  const auto zc = matmult::encrypt_vector(be, Vec::Zero(4), layout, 1);
  const SigmoidPoly q{0.5, 0.0, 0.0};
  const auto g = caesar_gradient_mlr(be, zc, zc, x, y, q, rng);
  CHECK(g.ops.mult == 0);
  CHECK(g.levels_consumed == 0);
  const Vec expect = x.transpose() * Vec::Constant(4, -0.5);
  CHECK(max_abs(to_real(matmult::reveal(be, g.result), be.params(), 2), expect) <= kTol);
}

TEST_CASE("CAESAR iteration matches a centralized step") {
  const SchemeParams p = params(8, 1);
  SemanticBackend keys_a(p), keys_b(p);
  std::mt19937_64 rng(16);
  const Mat xa = uniform(8, 3, rng), xb = uniform(8, 2, rng);
  const Vec y = (uniform(8, 1, rng).array() > 0.0).cast<double>().matrix().col(0);
  const Vec wa = uniform(3, 1, rng).col(0), wb = uniform(2, 1, rng).col(0);
  CaesarParty a{"A", xa, std::nullopt, {}, {}, std::mt19937_64(1)};
  CaesarParty b{"B", xb, y, {}, {}, std::mt19937_64(2)};
  netsim::Network net({}, {});
  caesar_share_weights(p, net, a, wa, b, wb);
  std::mt19937_64 dealer(3);
  const SigmoidPoly q;
  const auto batch = all_rows(8);
  const auto st = caesar_iteration(keys_a, keys_b, net, a, b, batch, 0.5, q, dealer);
  CHECK(st.levels_consumed_a == 1);
  CHECK(st.levels_consumed_b == 1);

  const Vec z = xa * wa + xb * wb;
  const Vec e = z.unaryExpr([&](double v) { return q(v); }) - y;
  CHECK(max_abs(caesar_weights(p, a, b), wa - 0.5 * xa.transpose() * e / 8.0) <= kTol);
  CHECK(max_abs(caesar_weights(p, b, a), wb - 0.5 * xb.transpose() * e / 8.0) <= kTol);
}

TEST_CASE("CAESAR iteration without folding exhausts one level") {
  const SchemeParams p = params(8, 1);
  SemanticBackend keys_a(p), keys_b(p);
  std::mt19937_64 rng(17);
  CaesarParty a{"A", uniform(8, 2, rng), std::nullopt, {}, {}, std::mt19937_64(1)};
  CaesarParty b{"B", uniform(8, 2, rng), Vec::Ones(8), {}, {}, std::mt19937_64(2)};
  netsim::Network net({}, {});
  caesar_share_weights(p, net, a, Vec::Zero(2), b, Vec::Zero(2));
  std::mt19937_64 dealer(3);
  const auto batch = all_rows(8);
  CHECK(code_of([&] { caesar_iteration(keys_a, keys_b, net, a, b, batch, 0.5, {}, dealer, false); }) ==
        ErrorCode::kLevelExhausted);
}

TEST_CASE("CAESAR iteration without folding at two levels consumes two") {
  const SchemeParams p = params(8, 2);
  SemanticBackend keys_a(p), keys_b(p);
  std::mt19937_64 rng(18);
  const Mat xa = uniform(8, 2, rng), xb = uniform(8, 2, rng);
  const Vec y = (uniform(8, 1, rng).array() > 0.0).cast<double>().matrix().col(0);
  CaesarParty a{"A", xa, std::nullopt, {}, {}, std::mt19937_64(1)};
  CaesarParty b{"B", xb, y, {}, {}, std::mt19937_64(2)};
  netsim::Network net({}, {});
  caesar_share_weights(p, net, a, Vec::Zero(2), b, Vec::Zero(2));
  std::mt19937_64 dealer(3);
  const auto batch = all_rows(8);
  const auto st = caesar_iteration(keys_a, keys_b, net, a, b, batch, 0.5, {}, dealer, false);
  CHECK(st.levels_consumed_b == 2);
  const Vec e = Vec::Constant(8, 0.5) - y;
  CHECK(max_abs(caesar_weights(p, b, a), -0.5 * xb.transpose() * e / 8.0) <= kTol);
}

namespace {

struct NnFixture {
  SchemeParams p = params(4);
  SemanticBackend keys{p};
  NnPartyA a;
  NnPartyB b;
  netsim::Network net{{}, cost_model_for(preset("paper-122"))};

  explicit NnFixture(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    a = NnPartyA{"A", uniform(4, 3, rng), uniform(3, 4, rng), std::mt19937_64(seed + 1), {}};
    b.name = "B";
    b.x = uniform(4, 2, rng);
    b.y = Vec::Ones(4);
    b.y(1) = 0.0;
    b.u = uniform(2, 3, rng);
    b.w_a = uniform(4, 2, rng);
    b.w_b = uniform(3, 2, rng);
    b.v = uniform(2, 1, rng).col(0);
    b.c = 0.1;
    b.rng.seed(seed + 2);
  }
};

}  // namespace

TEST_CASE("VFL-NN forward equals the cleartext interactive layer") {
  NnFixture f(20);
  const auto batch = all_rows(4);
  const Mat alpha_a = (f.a.x * f.a.u).array().tanh().matrix();
  const Mat alpha_b = (f.b.x * f.b.u).array().tanh().matrix();
  const Mat z = alpha_a * f.b.w_a + alpha_b * f.b.w_b;
  const auto st = vfl_nn_forward(f.keys, f.net, f.a, f.b, batch);
  CHECK(max_abs(st.z, z) <= kTol);
  CHECK(st.cipher_ops.rot == 0);
  CHECK(st.cipher_ops.hst_rot == 0);
  CHECK(st.cipher_ops.mult == 2 * 4);
}

TEST_CASE("VFL-NN forward with identity W_A passes alpha_A through") {
  NnFixture f(21);
  f.b.w_a = Mat::Identity(4, 4);
  f.b.w_b = Mat::Zero(3, 4);
  f.b.v = Vec::Ones(4);
  const auto batch = all_rows(4);
  const auto st = vfl_nn_forward(f.keys, f.net, f.a, f.b, batch);
  CHECK(max_abs(st.z, (f.a.x * f.a.u).array().tanh().matrix()) <= kTol);
}

TEST_CASE("VFL-NN backward matches the cleartext gradient and uploads alpha once") {
  NnFixture f(22);
  const auto batch = all_rows(4);
  const Mat alpha_a = (f.a.x * f.a.u).array().tanh().matrix();
  const Mat alpha_b = (f.b.x * f.b.u).array().tanh().matrix();
  const Mat h = (alpha_a * f.b.w_a + alpha_b * f.b.w_b).array().tanh().matrix();
  const Vec o = (h * f.b.v).array() + f.b.c;
  Vec d_o(4);
  for (Index i = 0; i < 4; ++i) d_o(i) = (sigmoid(o(i)) - f.b.y(i)) / 4.0;
  const Mat d_z = ((d_o * f.b.v.transpose()).array() * (1.0 - h.array().square())).matrix();
  const Mat grad_w_a = alpha_a.transpose() * d_z;
  const Mat d_alpha = ((d_z * f.b.w_a.transpose()).array() * (1.0 - alpha_a.array().square())).matrix();
  const Mat u_a_next = f.a.u - 0.1 * f.a.x.transpose() * d_alpha;

  vfl_nn_forward(f.keys, f.net, f.a, f.b, batch);
  const auto st = vfl_nn_backward(f.keys, f.net, f.a, f.b, batch, 0.1);
  CHECK(max_abs(st.grad_w_a, grad_w_a) <= kTol);
  CHECK(max_abs(f.a.u, u_a_next) <= kTol);
  CHECK(st.cipher_ops.rot == 0);
  CHECK(st.cipher_ops.hst_rot == 0);

  f.net.transcript().seal();
  CHECK(rlwe_messages(f.net.transcript(), "A") == 1);
  CHECK(count_records(f.net.transcript(), "A", "alpha_A", MessageKind::kRlweCt) == 1);
  CHECK(rlwe_messages(f.net.transcript(), "B") == 2);
}

TEST_CASE("VFL-NN backward needs the converted transpose") {
  NnFixture f(23);
  const auto batch = all_rows(4);
  vfl_nn_forward(f.keys, f.net, f.a, f.b, batch, false);
  CHECK(code_of([&] { vfl_nn_backward(f.keys, f.net, f.a, f.b, batch, 0.1); }) ==
        ErrorCode::kMissingConvertedTranspose);
}

TEST_CASE("VFL-NN rejects mismatched layer widths") {
  NnFixture f(24);
  f.b.w_a = Mat::Zero(3, 2);
  const auto batch = all_rows(4);
  CHECK(code_of([&] { vfl_nn_forward(f.keys, f.net, f.a, f.b, batch); }) == ErrorCode::kShapeMismatch);
}

TEST_CASE("training with zero epochs reports the initial loss only") {
  auto [data, truth] = generate_dataset({64, 4, 4, GroundTruthKind::kLinear, 0.1, 1});
  TrainingConfig cfg;
  cfg.epochs = 0;
  const auto r = train(data, cfg);
  REQUIRE(r.epochs.size() == 1);
  CHECK(r.epochs[0].epoch == 0);
  CHECK(r.epochs[0].loss == r.epochs[0].loss_central);
  CHECK(r.iterations == 0);
}

TEST_CASE("short training runs track the centralized reference") {
  SUBCASE("linr") {
    auto [data, truth] = generate_dataset({256, 4, 4, GroundTruthKind::kLinear, 0.1, 2});
    TrainingConfig cfg;
    cfg.epochs = 2;
    const auto r = train(data, cfg);
    for (const auto& e : r.epochs) CHECK(std::abs(e.loss - e.loss_central) <= 1e-3);
    CHECK(r.epochs.back().loss < r.epochs.front().loss);
    CHECK(r.comm.total_bytes() > 0);
  }
  SUBCASE("caesar") {
    auto [data, truth] = generate_dataset({256, 4, 4, GroundTruthKind::kLogistic, 0.1, 3});
    TrainingConfig cfg;
    cfg.protocol = Protocol::kCaesar;
    cfg.epochs = 2;
    cfg.lr = 0.5;
    const auto r = train(data, cfg);
    for (const auto& e : r.epochs) {
      CHECK(std::abs(e.loss - e.loss_central) <= 1e-2);
      CHECK(std::abs(*e.auc - *e.auc_central) <= 1e-2);
    }
  }
  SUBCASE("nn") {
    auto [data, truth] = generate_dataset({256, 4, 4, GroundTruthKind::kLogistic, 0.1, 4});
    TrainingConfig cfg;
    cfg.protocol = Protocol::kNn;
    cfg.epochs = 2;
    cfg.lr = 0.5;
    const auto r = train(data, cfg);
    for (const auto& e : r.epochs) CHECK(std::abs(e.loss - e.loss_central) <= 1e-2);
  }
}

TEST_CASE("training rejects bad configurations") {
  auto [data, truth] = generate_dataset({64, 2, 2, GroundTruthKind::kLinear, 0.0, 1});
  TrainingConfig cfg;
  cfg.batch_size = 0;
  CHECK(code_of([&] { train(data, cfg); }) == ErrorCode::kConfigInvalid);
  cfg.batch_size = 64;
  cfg.preset = "nope";
  CHECK(code_of([&] { train(data, cfg); }) == ErrorCode::kConfigInvalid);
  cfg.preset = "desk-1024";
  cfg.protocol = Protocol::kCaesar;
  CHECK(code_of([&] { train(data, cfg); }) == ErrorCode::kShapeMismatch);
}

TEST_CASE("ROC AUC on small cases") {
  Vec s(4), y(4);
  s << 0.1, 0.4, 0.35, 0.8;
  y << 0, 0, 1, 1;
  CHECK(roc_auc(s, y) == doctest::Approx(0.75));
  CHECK(roc_auc(Vec::Constant(4, 1.0), y) == doctest::Approx(0.5));
}

TEST_CASE("epoch batches cover every row once") {
  const auto b = epoch_batches(10, 4, 7, 1);
  REQUIRE(b.size() == 3);
  CHECK(b.back().size() == 2);
  std::vector<int> seen(10, 0);
  for (const auto& batch : b) {
    for (Index i : batch) ++seen[static_cast<std::size_t>(i)];
  }
  CHECK(seen == std::vector<int>(10, 1));
  CHECK(epoch_batches(10, 4, 7, 1) == b);
  CHECK(epoch_batches(10, 4, 7, 2) != b);
}
