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

#include "hevfl/protocols/linr.hpp"

#include "hevfl/error.hpp"
#include "hevfl/matmult/encode.hpp"
#include "hevfl/matmult/matmult.hpp"

namespace hevfl::protocols {

namespace {

constexpr const char* kArbiter = "C";

// X^T [[d]] with a fresh mask, sent to the arbiter; returns the gradient.
Vec gradient_through_arbiter(const Backend& be, netsim::Network& net, LinrParty& party, const Mat& xb,
                             const matmult::EncryptedVector& d, OpCounter& matmult_ops) {
  const SchemeParams& p = be.params();
  const Mat xt = xb.transpose();
  const auto enc = matmult::encode_for(matmult::Method::kPackVfl, xt, p, 1);
  matmult::PendingResult res;
  {
    MeasureScope scope;
    res = matmult::matmult(be, matmult::Method::kPackVfl, enc, d);
    matmult_ops = scope.measure().ops;
  }
  std::vector<std::vector<u64>> masks;
  send_cts(net, party.name, kArbiter, "masked_gradient", subtract_masks(be, res.ciphertexts, masks, party.rng));
  const auto reply = expect(net, party.name, kArbiter, "gradient_slots");
  const std::size_t slots = be.slot_count();
  std::vector<std::vector<u64>> slots_clear(masks.size());
  for (std::size_t c = 0; c < masks.size(); ++c) {
    slots_clear[c].resize(slots);
    for (std::size_t j = 0; j < slots; ++j) {
      slots_clear[c][j] = add_mod(reply.values[c * slots + j], masks[c][j], p.plain_modulus);
    }
  }
  const auto sums = matmult::finalize_lazy_ras(slots_clear, res.plan, p.plain_modulus);
  return to_real(sums, p, 2) / static_cast<double>(xb.rows());
}

}  // namespace

LinrIterationStats vfl_linr_iteration(const Backend& arbiter_keys, netsim::Network& net, LinrParty& a,
                                      LinrParty& b, std::span<const Index> batch, double lr) {
  if (!b.y) throw Error(ErrorCode::kShapeMismatch, "party B holds no labels");
  if (a.x.rows() != b.x.rows() || b.y->size() != b.x.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "parties hold different sample counts");
  }
  if (a.theta.size() != a.x.cols() || b.theta.size() != b.x.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "weight length differs from feature count");
  }
  const Backend& be = arbiter_keys;
  const SchemeParams& p = be.params();
  const std::size_t m = batch.size();
  const matmult::VectorLayout layout = packvfl_layout(m, p);
  LinrIterationStats st;

  auto party_a = [&] {
    MeasureScope scope;
    const Mat xb = take_rows(a.x, batch);
    const Vec u = xb * a.theta;
    const auto cu = matmult::encrypt_vector(be, u, layout, 1);
    send_cts(net, a.name, b.name, "u_A", cu.cts);
    const auto dm = expect(net, a.name, b.name, "d");
    st.grad_a = gradient_through_arbiter(be, net, a, xb, matmult::EncryptedVector{layout, dm.cts}, st.matmult_a);
    a.theta -= lr * st.grad_a;
    st.party_a = scope.measure();
  };

  auto party_b = [&] {
    MeasureScope scope;
    const Mat xb = take_rows(b.x, batch);
    const Vec diff = xb * b.theta - take_rows(*b.y, batch);
    const auto um = expect(net, b.name, a.name, "u_A");
    const auto pts = matmult::vector_plaintexts(to_residues(diff, p, 1), layout, p, 1);
    if (pts.size() != um.cts.size()) throw Error(ErrorCode::kShapeMismatch, "[[u_A]] has the wrong layout");
    matmult::EncryptedVector d{layout, {}};
    for (std::size_t i = 0; i < pts.size(); ++i) d.cts.push_back(be.add_plain(um.cts[i], pts[i]));
    send_cts(net, b.name, a.name, "d", d.cts);
    st.grad_b = gradient_through_arbiter(be, net, b, xb, d, st.matmult_b);
    b.theta -= lr * st.grad_b;
    st.party_b = scope.measure();
  };

  auto arbiter = [&] {
    MeasureScope scope;
    for (const std::string& from : {a.name, b.name}) {
      const auto msg = expect(net, kArbiter, from, "masked_gradient");
      std::vector<u64> flat;
      for (const auto& c : msg.cts) {
        const auto v = be.decrypt(c).values;
        flat.insert(flat.end(), v.begin(), v.end());
      }
      send_values(net, kArbiter, from, "gradient_slots", std::move(flat));
    }
    st.arbiter = scope.measure();
  };

  run_parties(net, {party_a, party_b, arbiter});
  return st;
}

}  // namespace hevfl::protocols
