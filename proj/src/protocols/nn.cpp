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

#include "hevfl/protocols/nn.hpp"

#include <algorithm>
#include <cmath>

#include "hevfl/error.hpp"
#include "hevfl/matmult/matmult.hpp"

namespace hevfl::protocols {

namespace {

// Column c of the blinded product from the flattened reply.
std::vector<u64> column_slice(const std::vector<u64>& flat, std::size_t c, std::size_t len) {
  return {flat.begin() + static_cast<std::ptrdiff_t>(c * len), flat.begin() + static_cast<std::ptrdiff_t>((c + 1) * len)};
}

// [[X]] W column by column, masked. Returns masked ciphertexts and the mask sums per column.
std::vector<CiphertextHandle> masked_cipher_products(const Backend& be, const matmult::EncryptedDiagonals& x,
                                                     const Mat& w, std::vector<std::vector<u64>>& mask_sums,
                                                     OpCounter& ops, std::mt19937_64& rng) {
  const SchemeParams& p = be.params();
  std::vector<CiphertextHandle> out;
  mask_sums.clear();
  for (Index col = 0; col < w.cols(); ++col) {
    matmult::PendingResult r;
    {
      MeasureScope scope;
      r = matmult::matmult_cipher_matrix(be, x, to_residues(w.col(col), p, 1), 1);
      ops += scope.measure().ops;
    }
    std::vector<std::vector<u64>> masks;
    const auto masked = subtract_masks(be, r.ciphertexts, masks, rng);
    out.insert(out.end(), masked.begin(), masked.end());
    mask_sums.push_back(matmult::finalize_lazy_ras(masks, r.plan, p.plain_modulus));
  }
  return out;
}

// Key owner: decrypts each column and finalizes it with the shape's plan.
std::vector<u64> blinded_columns(const Backend& be, const std::vector<CiphertextHandle>& cts,
                                 const matmult::EncryptedDiagonals& shape) {
  const auto plan = matmult::cipher_matrix_plan(shape, be.slot_count());
  std::vector<u64> flat;
  for (const auto& ct : cts) {
    const auto col = matmult::finalize_lazy_ras(matmult::decrypt_all(be, {ct}), plan, be.params().plain_modulus);
    flat.insert(flat.end(), col.begin(), col.end());
  }
  return flat;
}

// Adds the mask sums back and decodes at Δ^2.
Mat unblind(const std::vector<u64>& flat, const std::vector<std::vector<u64>>& mask_sums, std::size_t rows,
            const SchemeParams& p) {
  Mat out(static_cast<Index>(rows), static_cast<Index>(mask_sums.size()));
  for (std::size_t c = 0; c < mask_sums.size(); ++c) {
    auto col = column_slice(flat, c, rows);
    for (std::size_t i = 0; i < rows; ++i) col[i] = add_mod(col[i], mask_sums[c][i], p.plain_modulus);
    out.col(static_cast<Index>(c)) = to_real(col, p, 2);
  }
  return out;
}

// Shape descriptor for a key owner that never sees the ciphertexts' metadata.
matmult::EncryptedDiagonals shape_only(std::size_t rows, std::size_t cols) {
  return {rows, cols, next_power_of_two(rows), next_power_of_two(cols), false, {}};
}

}  // namespace

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

NnForwardStats vfl_nn_forward(const Backend& keys_a, netsim::Network& net, NnPartyA& a, NnPartyB& b,
                              std::span<const Index> batch, bool convert_transpose) {
  if (a.x.rows() != b.x.rows() || b.y.size() != b.x.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "parties hold different sample counts");
  }
  if (b.w_a.rows() != a.u.cols() || b.w_b.rows() != b.u.cols() || b.w_a.cols() != b.w_b.cols() ||
      b.v.size() != b.w_a.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "layer widths do not line up");
  }
  const SchemeParams& p = keys_a.params();
  const std::size_t m = batch.size();
  const std::size_t width = static_cast<std::size_t>(b.w_a.cols());
  NnForwardStats st;

  auto party_a = [&] {
    MeasureScope scope;
    a.alpha = (take_rows(a.x, batch) * a.u).array().tanh().matrix();
    send_cts(net, a.name, b.name, "alpha_A", matmult::encrypt_diagonals(keys_a, a.alpha, 1).cts);
    const auto msg = expect(net, a.name, b.name, "masked_z_A");
    if (msg.cts.size() != width) throw Error(ErrorCode::kShapeMismatch, "unexpected product count");
    send_values(net, a.name, b.name, "blinded_z_A",
                blinded_columns(keys_a, msg.cts, shape_only(m, static_cast<std::size_t>(a.alpha.cols()))));
    st.party_a = scope.measure();
  };

  auto party_b = [&] {
    MeasureScope scope;
    const auto up = expect(net, b.name, a.name, "alpha_A");
    const std::size_t ha = static_cast<std::size_t>(b.w_a.rows());
    matmult::EncryptedDiagonals alpha = shape_only(m, ha);
    alpha.cts = up.cts;
    if (alpha.cts.size() != std::min(alpha.m, alpha.n)) throw Error(ErrorCode::kShapeMismatch, "[[alpha_A]] has the wrong shape");
    std::vector<std::vector<u64>> mask_sums;
    send_cts(net, b.name, a.name, "masked_z_A", masked_cipher_products(keys_a, alpha, b.w_a, mask_sums, st.cipher_ops, b.rng));
    b.alpha_a_t.reset();
    if (convert_transpose) b.alpha_a_t = matmult::transpose_diag_convert(keys_a, alpha);
    b.alpha_a = std::move(alpha);
    b.alpha_b = (take_rows(b.x, batch) * b.u).array().tanh().matrix();
    const auto reply = expect(net, b.name, a.name, "blinded_z_A");
    const Mat z_a = unblind(reply.values, mask_sums, m, p);
    b.z = z_a + b.alpha_b * b.w_b;
    b.h = b.z.array().tanh().matrix();
    b.o = (b.h * b.v).array() + b.c;
    st.party_b = scope.measure();
  };

  run_parties(net, {party_a, party_b});
  st.output = b.o;
  st.z = b.z;
  return st;
}

NnBackwardStats vfl_nn_backward(const Backend& keys_a, netsim::Network& net, NnPartyA& a, NnPartyB& b,
                                std::span<const Index> batch, double lr) {
  if (!b.alpha_a_t) {
    throw Error(ErrorCode::kMissingConvertedTranspose, "[[alpha_A^T]] was not prepared during the forward pass");
  }
  const SchemeParams& p = keys_a.params();
  const std::size_t m = batch.size();
  if (static_cast<std::size_t>(b.o.size()) != m || static_cast<std::size_t>(a.alpha.rows()) != m) {
    throw Error(ErrorCode::kShapeMismatch, "backward batch differs from the forward batch");
  }
  const std::size_t ha = static_cast<std::size_t>(b.w_a.rows());
  const std::size_t width = static_cast<std::size_t>(b.w_a.cols());
  NnBackwardStats st;

  auto party_b = [&] {
    MeasureScope scope;
    const Vec yb = take_rows(b.y, batch);
    const double md = static_cast<double>(m);
    Vec prob(static_cast<Index>(m));
    for (Index i = 0; i < prob.size(); ++i) {
      prob(i) = sigmoid(b.o(i));
      const double pc = std::clamp(prob(i), 1e-12, 1.0 - 1e-12);
      st.loss -= (yb(i) * std::log(pc) + (1.0 - yb(i)) * std::log(1.0 - pc)) / md;
    }
    const Vec d_o = (prob - yb) / md;
    const Mat d_z = ((d_o * b.v.transpose()).array() * (1.0 - b.h.array().square())).matrix();
    // Scaled by m so the fixed-point encoding keeps its precision.
    const Mat scaled = md * d_z;
    std::vector<std::vector<u64>> mask_sums;
    send_cts(net, b.name, a.name, "masked_grad_W_A",
             masked_cipher_products(keys_a, *b.alpha_a_t, scaled, mask_sums, st.cipher_ops, b.rng));
    const Mat d_alpha_a = d_z * b.w_a.transpose();
    const Mat d_alpha_b = d_z * b.w_b.transpose();
    const Vec grad_v = b.h.transpose() * d_o;
    const double grad_c = d_o.sum();
    const Mat grad_w_b = b.alpha_b.transpose() * d_z;
    const Mat grad_u_b =
        take_rows(b.x, batch).transpose() * (d_alpha_b.array() * (1.0 - b.alpha_b.array().square())).matrix();
    const auto reply = expect(net, b.name, a.name, "blinded_grad_W_A");
    st.grad_w_a = unblind(reply.values, mask_sums, ha, p) / md;
    Mat flat = d_alpha_a;
    send_values(net, b.name, a.name, "grad_alpha_A",
                to_residues(Eigen::Map<const Vec>(flat.data(), flat.size()), p, 2));
    b.v -= lr * grad_v;
    b.c -= lr * grad_c;
    b.w_b -= lr * grad_w_b;
    b.u -= lr * grad_u_b;
    b.w_a -= lr * st.grad_w_a;
    b.alpha_a_t.reset();
    st.party_b = scope.measure();
  };

  auto party_a = [&] {
    MeasureScope scope;
    const auto msg = expect(net, a.name, b.name, "masked_grad_W_A");
    if (msg.cts.size() != width) {
      throw Error(ErrorCode::kShapeMismatch, "unexpected gradient ciphertext count");
    }
    send_values(net, a.name, b.name, "blinded_grad_W_A", blinded_columns(keys_a, msg.cts, shape_only(ha, m)));
    const auto g = expect(net, a.name, b.name, "grad_alpha_A");
    const Vec gv = to_real(g.values, p, 2);
    const Mat d_alpha = Eigen::Map<const Mat>(gv.data(), a.alpha.rows(), a.alpha.cols());
    const Mat grad_u = take_rows(a.x, batch).transpose() * (d_alpha.array() * (1.0 - a.alpha.array().square())).matrix();
    a.u -= lr * grad_u;
    st.party_a = scope.measure();
  };

  run_parties(net, {party_a, party_b});
  return st;
}

}  // namespace hevfl::protocols
