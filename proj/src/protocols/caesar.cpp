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

#include "hevfl/protocols/caesar.hpp"

#include <cmath>

#include "hevfl/error.hpp"
#include "hevfl/matmult/encode.hpp"
#include "hevfl/matmult/matmult.hpp"

namespace hevfl::protocols {

namespace {

using IMat = Eigen::Matrix<i64, Eigen::Dynamic, Eigen::Dynamic>;

// X (fixed-point integers) times residues, mod t.
std::vector<u64> fixed_matvec(const IMat& x, std::span<const u64> v, u64 t) {
  std::vector<u64> out(static_cast<std::size_t>(x.rows()), 0);
  for (Index i = 0; i < x.rows(); ++i) {
    u64 acc = 0;
    for (Index j = 0; j < x.cols(); ++j) {
      acc = add_mod(acc, mul_mod(reduce_signed(x(i, j), t), v[static_cast<std::size_t>(j)], t), t);
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

std::vector<u64> add_vec(std::span<const u64> a, std::span<const u64> b, u64 t) {
  std::vector<u64> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = add_mod(a[i], b[i], t);
  return out;
}

std::vector<u64> sub_vec(std::span<const u64> a, std::span<const u64> b, u64 t) {
  std::vector<u64> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = sub_mod(a[i], b[i], t);
  return out;
}

matmult::EncryptedVector encrypt_in_layout(const Backend& be, std::span<const u64> v,
                                           const matmult::VectorLayout& layout, int exp) {
  matmult::EncryptedVector out{layout, {}};
  for (const auto& pt : matmult::vector_plaintexts({v.begin(), v.end()}, layout, be.params(), exp)) {
    out.cts.push_back(be.encrypt(pt));
  }
  return out;
}

// [[c]] + own share, in place.
matmult::EncryptedVector add_share(const Backend& be, const std::vector<CiphertextHandle>& cts,
                                   std::span<const u64> share, const matmult::VectorLayout& layout) {
  const auto pts = matmult::vector_plaintexts({share.begin(), share.end()}, layout, be.params(), 1);
  if (pts.size() != cts.size()) throw Error(ErrorCode::kShapeMismatch, "ciphertext count differs from layout");
  matmult::EncryptedVector out{layout, {}};
  for (std::size_t i = 0; i < cts.size(); ++i) out.cts.push_back(be.add_plain(cts[i], pts[i]));
  return out;
}

int min_level(const std::vector<CiphertextHandle>& cts) {
  int lv = cts.front().level;
  for (const auto& c : cts) lv = std::min(lv, c.level);
  return lv;
}

matmult::ReductionPlan plan_for_shape(std::size_t rows, std::size_t cols, const SchemeParams& p,
                                      std::size_t& ct_count) {
  const IMat probe = IMat::Zero(static_cast<Index>(rows), static_cast<Index>(cols));
  const auto enc = matmult::encode_for(matmult::Method::kPackVfl, probe, p);
  ct_count = matmult::packvfl_result_count(enc);
  return matmult::packvfl_plan(enc);
}

std::vector<std::vector<u64>> unflatten(const std::vector<u64>& flat, std::size_t slots) {
  std::vector<std::vector<u64>> out;
  for (std::size_t i = 0; i < flat.size(); i += slots) out.emplace_back(flat.begin() + i, flat.begin() + i + slots);
  return out;
}

// Matrix owner's half of the cross product X [[v]]: computes, masks, sends,
// and keeps the mask sums as its share.
std::vector<u64> cross_matrix_side(const Backend& peer_keys, netsim::Network& net, CaesarParty& me,
                                   const std::string& peer, const Mat& xb, OpCounter& ops) {
  const auto msg = expect(net, me.name, peer, "weight_share");
  const auto enc = matmult::encode_for(matmult::Method::kPackVfl, xb, peer_keys.params(), 1);
  const matmult::EncryptedVector v{matmult::required_layout(enc), msg.cts};
  matmult::PendingResult res;
  {
    MeasureScope scope;
    res = matmult::matmult(peer_keys, matmult::Method::kPackVfl, enc, v);
    ops = scope.measure().ops;
  }
  std::vector<std::vector<u64>> masks;
  send_cts(net, me.name, peer, "masked_product", subtract_masks(peer_keys, res.ciphertexts, masks, me.rng));
  return matmult::finalize_lazy_ras(masks, res.plan, peer_keys.params().plain_modulus);
}

// Key owner's half: receives the masked product and finalizes it.
std::vector<u64> cross_key_side(const Backend& my_keys, netsim::Network& net, const std::string& me,
                                const std::string& peer, std::size_t rows, std::size_t cols) {
  const auto msg = expect(net, me, peer, "masked_product");
  std::size_t count = 0;
  const auto plan = plan_for_shape(rows, cols, my_keys.params(), count);
  if (msg.cts.size() != count) throw Error(ErrorCode::kShapeMismatch, "unexpected product ciphertext count");
  return matmult::finalize_lazy_ras(matmult::decrypt_all(my_keys, msg.cts), plan, my_keys.params().plain_modulus);
}

// Opens x - a and y - b for a product of shared vectors and finishes it.
std::vector<u64> beaver_mult(netsim::Network& net, int party, const std::string& me, const std::string& peer,
                             std::span<const u64> x, std::span<const u64> y, const TripleShare& tr, u64 t) {
  std::vector<u64> open = beaver_open_share(x, tr.a, t);
  const std::vector<u64> e_part = beaver_open_share(y, tr.b, t);
  open.insert(open.end(), e_part.begin(), e_part.end());
  send_values(net, me, peer, "beaver_open", open);
  const auto other = expect(net, me, peer, "beaver_open");
  const std::size_t n = x.size();
  std::vector<u64> d(n), e(n);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = add_mod(open[i], other.values[i], t);
    e[i] = add_mod(open[n + i], other.values[n + i], t);
  }
  return beaver_finish(party, d, e, tr, t);
}

GradientCiphertexts finish_gradient(const Backend& be, std::vector<CiphertextHandle> cts,
                                    const matmult::ReductionPlan& plan, std::size_t count,
                                    std::span<const u64> clear_term, int start_level, int exp,
                                    std::mt19937_64& rng) {
  const SchemeParams& p = be.params();
  const auto aligned = matmult::align_to_plan_cts(clear_term, plan, count, be.slot_count(), p.plain_modulus, rng);
  GradientCiphertexts g;
  for (std::size_t i = 0; i < count; ++i) {
    const Plaintext pt = from_residues(aligned[i], p, exp);
    if (cts.empty()) {
      g.result.ciphertexts.push_back(be.encrypt(pt));
    } else {
      g.result.ciphertexts.push_back(be.add_plain(cts[i], pt));
    }
  }
  g.result.plan = plan;
  g.result.lazy = true;
  g.levels_consumed = start_level - min_level(g.result.ciphertexts);
  return g;
}

void accumulate_into(const Backend& be, std::vector<CiphertextHandle>& acc, const std::vector<CiphertextHandle>& r) {
  if (acc.empty()) {
    acc = r;
    return;
  }
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = be.add(acc[i], r[i]);
}

// Gradient for the party without labels: [[q0 - y]] arrives encrypted.
GradientCiphertexts gradient_encrypted_label(const Backend& be, const matmult::EncryptedVector& z,
                                             const matmult::EncryptedVector& z3,
                                             const matmult::EncryptedVector& label, const Mat& x,
                                             const SigmoidPoly& q) {
  const SchemeParams& p = be.params();
  GradientCiphertexts g;
  const int start = min_level(z.cts);
  MeasureScope scope;
  const Mat xt = x.transpose();
  const auto enc0 = matmult::encode_for(matmult::Method::kPackVfl, xt, p, 1);
  std::vector<CiphertextHandle> acc = matmult::matmult(be, matmult::Method::kPackVfl, enc0, label).ciphertexts;
  if (q.q1 != 0.0) {
    const Mat m1 = q.q1 * xt;
    const auto enc = matmult::encode_for(matmult::Method::kPackVfl, m1, p, 1);
    accumulate_into(be, acc, matmult::matmult(be, matmult::Method::kPackVfl, enc, z).ciphertexts);
  }
  if (q.q2 != 0.0) {
    const Mat m2 = q.q2 * xt;
    const auto enc = matmult::encode_for(matmult::Method::kPackVfl, m2, p, 1);
    accumulate_into(be, acc, matmult::matmult(be, matmult::Method::kPackVfl, enc, z3).ciphertexts);
  }
  g.result.ciphertexts = std::move(acc);
  g.result.plan = matmult::packvfl_plan(enc0);
  g.result.lazy = true;
  g.levels_consumed = start - min_level(g.result.ciphertexts);
  g.ops = scope.measure().ops;
  return g;
}

}  // namespace

void caesar_share_weights(const SchemeParams& p, netsim::Network& net, CaesarParty& a, const Vec& w_a,
                          CaesarParty& b, const Vec& w_b) {
  const u64 t = p.plain_modulus;
  run_parties(net, {[&] {
                      const Shares s = secret_share(to_residues(w_a, p, 1), t, a.rng);
                      a.own_share = s.first;
                      send_values(net, a.name, b.name, "weight_share_init", s.second);
                      a.peer_share = expect(net, a.name, b.name, "weight_share_init").values;
                    },
                    [&] {
                      const Shares s = secret_share(to_residues(w_b, p, 1), t, b.rng);
                      b.own_share = s.second;
                      send_values(net, b.name, a.name, "weight_share_init", s.first);
                      b.peer_share = expect(net, b.name, a.name, "weight_share_init").values;
                    }});
}

Vec caesar_weights(const SchemeParams& p, const CaesarParty& owner, const CaesarParty& peer) {
  return to_real(reconstruct(Shares{owner.own_share, peer.peer_share}, p.plain_modulus), p, 1);
}

CaesarForwardResult caesar_forward(const Backend& keys_a, const Backend& keys_b, netsim::Network& net,
                                   CaesarParty& a, CaesarParty& b, std::span<const Index> batch) {
  const SchemeParams& p = keys_a.params();
  const u64 t = p.plain_modulus;
  if (keys_b.params().plain_modulus != t || keys_b.slot_count() != keys_a.slot_count()) {
    throw Error(ErrorCode::kConfigInvalid, "both key pairs must share plaintext modulus and slot count");
  }
  if (a.x.rows() != b.x.rows()) throw Error(ErrorCode::kShapeMismatch, "parties hold different sample counts");
  if (a.own_share.size() != static_cast<std::size_t>(a.x.cols()) ||
      b.own_share.size() != static_cast<std::size_t>(b.x.cols()) || a.peer_share.size() != b.own_share.size() ||
      b.peer_share.size() != a.own_share.size()) {
    throw Error(ErrorCode::kShapeMismatch, "weight shares do not match the feature counts");
  }
  const std::size_t m = batch.size();
  const std::size_t na = static_cast<std::size_t>(a.x.cols()), nb = static_cast<std::size_t>(b.x.cols());
  CaesarForwardResult r;

  auto party_a = [&] {
    MeasureScope scope;
    const Mat xb = take_rows(a.x, batch);
    send_cts(net, a.name, b.name, "weight_share", encrypt_in_layout(keys_a, a.peer_share, packvfl_layout(nb, p), 1).cts);
    r.za_cross.first = cross_matrix_side(keys_b, net, a, b.name, xb, r.matmult_a);
    r.zb_cross.first = cross_key_side(keys_a, net, a.name, b.name, m, nb);
    const auto local = fixed_matvec(to_fixed_matrix(xb, p, 1), a.own_share, t);
    const auto raw = add_vec(add_vec(local, r.za_cross.first, t), r.zb_cross.first, t);
    r.z.first = truncate_share(raw, p.scale, 0, t);
    r.party_a = scope.measure();
  };

  auto party_b = [&] {
    MeasureScope scope;
    const Mat xb = take_rows(b.x, batch);
    send_cts(net, b.name, a.name, "weight_share", encrypt_in_layout(keys_b, b.peer_share, packvfl_layout(na, p), 1).cts);
    r.zb_cross.second = cross_matrix_side(keys_a, net, b, a.name, xb, r.matmult_b);
    r.za_cross.second = cross_key_side(keys_b, net, b.name, a.name, m, na);
    const auto local = fixed_matvec(to_fixed_matrix(xb, p, 1), b.own_share, t);
    const auto raw = add_vec(add_vec(local, r.zb_cross.second, t), r.za_cross.second, t);
    r.z.second = truncate_share(raw, p.scale, 1, t);
    r.party_b = scope.measure();
  };

  run_parties(net, {party_a, party_b});
  return r;
}

GradientCiphertexts caesar_gradient_mlr(const Backend& be, const matmult::EncryptedVector& z,
                                        const matmult::EncryptedVector& z3, const Mat& x, const Vec& y,
                                        const SigmoidPoly& q, std::mt19937_64& rng) {
  if (y.size() != x.rows()) throw Error(ErrorCode::kShapeMismatch, "labels differ from batch rows");
  const SchemeParams& p = be.params();
  const u64 t = p.plain_modulus;
  const int start = min_level(z.cts);
  MeasureScope scope;
  const Mat xt = x.transpose();
  std::size_t count = 0;
  const auto plan = plan_for_shape(static_cast<std::size_t>(xt.rows()), static_cast<std::size_t>(xt.cols()), p, count);
  std::vector<CiphertextHandle> acc;
  if (q.q1 != 0.0) {
    const Mat m1 = q.q1 * xt;
    const auto enc = matmult::encode_for(matmult::Method::kPackVfl, m1, p, 1);
    accumulate_into(be, acc, matmult::matmult(be, matmult::Method::kPackVfl, enc, z).ciphertexts);
  }
  if (q.q2 != 0.0) {
    const Mat m2 = q.q2 * xt;
    const auto enc = matmult::encode_for(matmult::Method::kPackVfl, m2, p, 1);
    accumulate_into(be, acc, matmult::matmult(be, matmult::Method::kPackVfl, enc, z3).ciphertexts);
  }
  const Vec bias = Vec::Constant(y.size(), q.q0) - y;
  const auto clear = fixed_matvec(to_fixed_matrix(xt, p, 1), to_residues(bias, p, 1), t);
  GradientCiphertexts g = finish_gradient(be, std::move(acc), plan, count, clear, start, 2, rng);
  g.ops = scope.measure().ops;
  return g;
}

GradientCiphertexts caesar_gradient_unreduced(const Backend& be, const matmult::EncryptedVector& z,
                                              const matmult::EncryptedVector& z3, const Mat& x, const Vec& y,
                                              const SigmoidPoly& q) {
  if (y.size() != x.rows()) throw Error(ErrorCode::kShapeMismatch, "labels differ from batch rows");
  const SchemeParams& p = be.params();
  const u64 t = p.plain_modulus;
  const int start = min_level(z.cts);
  MeasureScope scope;
  const std::size_t slots = be.slot_count();
  const Plaintext q1 = from_residues(std::vector<u64>(slots, reduce_signed(to_fixed(q.q1, p, 1), t)), p, 1);
  const Plaintext q2 = from_residues(std::vector<u64>(slots, reduce_signed(to_fixed(q.q2, p, 1), t)), p, 1);
  const Vec bias = Vec::Constant(y.size(), q.q0) - y;
  const auto bias_pts = matmult::vector_plaintexts(to_residues(bias, p, 2), z.layout, p, 2);
  matmult::EncryptedVector e{z.layout, {}};
  for (std::size_t i = 0; i < z.cts.size(); ++i) {
    const CiphertextHandle lin = be.add(be.mult_plain(q1, z.cts[i]), be.mult_plain(q2, z3.cts[i]));
    e.cts.push_back(be.add_plain(lin, bias_pts[i]));
  }
  const Mat xt = x.transpose();
  const auto enc = matmult::encode_for(matmult::Method::kPackVfl, xt, p, 1);
  GradientCiphertexts g;
  g.result = matmult::matmult(be, matmult::Method::kPackVfl, enc, e);
  g.levels_consumed = start - min_level(g.result.ciphertexts);
  g.ops = scope.measure().ops;
  return g;
}

CaesarIterationStats caesar_iteration(const Backend& keys_a, const Backend& keys_b, netsim::Network& net,
                                      CaesarParty& a, CaesarParty& b, std::span<const Index> batch, double lr,
                                      const SigmoidPoly& q, std::mt19937_64& dealer, bool fold_levels) {
  if (!b.y) throw Error(ErrorCode::kShapeMismatch, "party B holds no labels");
  const SchemeParams& p = keys_a.params();
  const u64 t = p.plain_modulus;
  const std::size_t m = batch.size();
  CaesarIterationStats st;
  st.forward = caesar_forward(keys_a, keys_b, net, a, b, batch);
  const auto [t1a, t1b] = deal_triples(m, t, dealer);
  const auto [t2a, t2b] = deal_triples(m, t, dealer);
  const matmult::VectorLayout layout = packvfl_layout(m, p);
  const std::size_t na = static_cast<std::size_t>(a.x.cols()), nb = static_cast<std::size_t>(b.x.cols());
  const u64 step = static_cast<u64>(std::llround(static_cast<double>(p.scale) * static_cast<double>(m) / lr));

  auto party_a = [&] {
    MeasureScope scope;
    const auto& z = st.forward.z.first;
    const auto z2 = truncate_share(beaver_mult(net, 0, a.name, b.name, z, z, t1a, t), p.scale, 0, t);
    const auto z3 = truncate_share(beaver_mult(net, 0, a.name, b.name, z2, z, t2a, t), p.scale, 0, t);
    // B's gradient runs under A's key.
    auto zc = encrypt_in_layout(keys_a, z, layout, 1).cts;
    const auto z3c = encrypt_in_layout(keys_a, z3, layout, 1).cts;
    zc.insert(zc.end(), z3c.begin(), z3c.end());
    send_cts(net, a.name, b.name, "z_shares", std::move(zc));
    // A's gradient under B's key.
    const auto in = expect(net, a.name, b.name, "z_shares_and_label");
    const std::size_t k = layout.blocks;
    const std::vector<CiphertextHandle> zb(in.cts.begin(), in.cts.begin() + k), z3b(in.cts.begin() + k, in.cts.begin() + 2 * k),
        lb(in.cts.begin() + 2 * k, in.cts.end());
    const Mat xb = take_rows(a.x, batch);
    const auto g = gradient_encrypted_label(keys_b, add_share(keys_b, zb, z, layout), add_share(keys_b, z3b, z3, layout),
                                            matmult::EncryptedVector{layout, lb}, xb, q);
    st.levels_consumed_a = g.levels_consumed;
    std::vector<std::vector<u64>> masks;
    send_cts(net, a.name, b.name, "masked_gradient", subtract_masks(keys_b, g.result.ciphertexts, masks, a.rng));
    const auto ga_share = matmult::finalize_lazy_ras(masks, g.result.plan, t);
    // B's gradient comes back masked for A to decrypt.
    const auto gm = expect(net, a.name, b.name, "masked_gradient");
    std::size_t count = 0;
    const auto plan_b = plan_for_shape(nb, m, p, count);
    const auto gb_share = matmult::finalize_lazy_ras(matmult::decrypt_all(keys_a, gm.cts), plan_b, t);
    const u64 step_b = fold_levels ? step : step * p.scale;
    a.own_share = sub_vec(a.own_share, truncate_share(ga_share, step, 0, t), t);
    a.peer_share = sub_vec(a.peer_share, truncate_share(gb_share, step_b, 0, t), t);
    st.party_a = scope.measure();
  };

  auto party_b = [&] {
    MeasureScope scope;
    const auto& z = st.forward.z.second;
    const auto z2 = truncate_share(beaver_mult(net, 1, b.name, a.name, z, z, t1b, t), p.scale, 1, t);
    const auto z3 = truncate_share(beaver_mult(net, 1, b.name, a.name, z2, z, t2b, t), p.scale, 1, t);
    const Mat xb = take_rows(b.x, batch);
    const Vec yb = take_rows(*b.y, batch);
    auto out = encrypt_in_layout(keys_b, z, layout, 1).cts;
    const auto z3c = encrypt_in_layout(keys_b, z3, layout, 1).cts;
    const auto lc = encrypt_in_layout(keys_b, to_residues(Vec::Constant(yb.size(), q.q0) - yb, p, 1), layout, 1).cts;
    out.insert(out.end(), z3c.begin(), z3c.end());
    out.insert(out.end(), lc.begin(), lc.end());
    send_cts(net, b.name, a.name, "z_shares_and_label", std::move(out));
    const auto in = expect(net, b.name, a.name, "z_shares");
    const std::size_t k = layout.blocks;
    const std::vector<CiphertextHandle> za(in.cts.begin(), in.cts.begin() + k), z3a(in.cts.begin() + k, in.cts.end());
    const auto zz = add_share(keys_a, za, z, layout);
    const auto zz3 = add_share(keys_a, z3a, z3, layout);
    const GradientCiphertexts g = fold_levels ? caesar_gradient_mlr(keys_a, zz, zz3, xb, yb, q, b.rng)
                                              : caesar_gradient_unreduced(keys_a, zz, zz3, xb, yb, q);
    st.levels_consumed_b = g.levels_consumed;
    std::vector<std::vector<u64>> masks;
    send_cts(net, b.name, a.name, "masked_gradient", subtract_masks(keys_a, g.result.ciphertexts, masks, b.rng));
    const auto gb_share = matmult::finalize_lazy_ras(masks, g.result.plan, t);
    const auto gm = expect(net, b.name, a.name, "masked_gradient");
    std::size_t count = 0;
    const auto plan_a = plan_for_shape(na, m, p, count);
    const auto ga_share = matmult::finalize_lazy_ras(matmult::decrypt_all(keys_b, gm.cts), plan_a, t);
    const u64 step_b = fold_levels ? step : step * p.scale;
    b.own_share = sub_vec(b.own_share, truncate_share(gb_share, step_b, 1, t), t);
    b.peer_share = sub_vec(b.peer_share, truncate_share(ga_share, step, 1, t), t);
    st.party_b = scope.measure();
  };

  run_parties(net, {party_a, party_b});
  return st;
}

}  // namespace hevfl::protocols
