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

#include "hevfl/matmult/matmult.hpp"

#include <algorithm>
#include <string>

#include "hevfl/error.hpp"

namespace hevfl::matmult {

namespace {

CiphertextHandle accumulate(const Backend& be, std::optional<CiphertextHandle>& acc, const CiphertextHandle& c) {
  acc = acc ? be.add(*acc, c) : c;
  return *acc;
}

// S += RotL(S, step) for step = n/2 ... stride; hoisted issues one-offset O4 calls.
CiphertextHandle rotate_and_sum(const Backend& be, CiphertextHandle s, std::size_t n, std::size_t stride,
                                bool hoisted) {
  for (std::size_t step = n / 2; step >= stride && step > 0; step /= 2) {
    if (hoisted) {
      const std::size_t off[] = {step};
      s = be.add(s, be.hoisted_rotate(s, off).front());
    } else {
      s = be.add(s, be.rotate(s, step));
    }
  }
  return s;
}

std::size_t log2_ceil_ratio(std::size_t n, std::size_t m) { return n > m ? log2_exact(n / m) : 0; }

void check_inputs(const Backend& be, Method method, const DiagonalEncodedMatrix& x, const EncryptedVector& y) {
  if (x.scheme != method) {
    throw Error(ErrorCode::kEncodingMismatch,
                "matrix encoded for " + to_string(x.scheme) + ", used with " + to_string(method));
  }
  if (x.slots != be.slot_count()) {
    throw Error(ErrorCode::kSlotCountMismatch, "matrix encoded for a different slot count");
  }
  const VectorLayout want = required_layout(x);
  std::size_t cts = want.kind == VectorKind::kElementReplicated ? want.length : want.blocks;
  if (!(y.layout == want) || y.cts.size() != cts) {
    throw Error(ErrorCode::kReplicationMismatch, to_string(method) + " needs a different vector layout");
  }
}

}  // namespace

ReductionPlan identity_plan(std::size_t rows, std::size_t ct) {
  ReductionPlan plan(rows);
  for (std::size_t k = 0; k < rows; ++k) plan[k] = {SlotRef{ct, k}};
  return plan;
}

ReductionPlan packed_plan(std::size_t rows, std::size_t n, std::size_t m_prime, std::size_t slots, std::size_t ct) {
  ReductionPlan plan(rows);
  const std::size_t terms = n / m_prime;
  for (std::size_t k = 0; k < rows; ++k) {
    const std::size_t s = k / m_prime;
    const std::size_t rho = k % m_prime;
    for (std::size_t t = 0; t < terms; ++t) {
      const std::size_t slot = s * n + rho + t * m_prime;
      if (slot >= slots) throw Error(ErrorCode::kPlanMismatch, "plan slot out of range");
      plan[k].push_back(SlotRef{ct, slot});
    }
  }
  return plan;
}

ReductionPlan packvfl_plan(const DiagonalEncodedMatrix& x) {
  if (x.scheme != Method::kPackVfl) throw Error(ErrorCode::kEncodingMismatch, "not a packvfl encoding");
  if (!x.partition) return packed_plan(x.rows, x.n, x.diagonals_per_block, x.slots);
  const PartitionPlan& plan = *x.partition;
  ReductionPlan out;
  for (std::size_t r = 0; r < plan.row_blocks; ++r) {
    const std::size_t first = r * plan.block_rows;
    const std::size_t rows_here = first >= x.rows ? 0 : std::min(plan.block_rows, x.rows - first);
    auto block_plan = packed_plan(rows_here, plan.block_cols, x.diagonals_per_block, x.slots, r);
    out.insert(out.end(), block_plan.begin(), block_plan.end());
  }
  return out;
}

std::size_t packvfl_result_count(const DiagonalEncodedMatrix& x) {
  return x.partition ? x.partition->row_blocks : 1;
}

PendingResult matmult(const Backend& be, Method method, const DiagonalEncodedMatrix& x, const EncryptedVector& y,
                      const MatMultOptions& options) {
  if (method == Method::kCheetah) {
    throw Error(ErrorCode::kEncodingMismatch, "coefficient packing returns LWE ciphertexts; use matmult_cheetah");
  }
  check_inputs(be, method, x, y);
  const std::size_t m = x.m, n = x.n;
  const auto& diags = x.diagonals();
  PendingResult out;
  std::optional<CiphertextHandle> acc;

  switch (method) {
    case Method::kNaive: {
      std::vector<u64> indicator(x.slots, 0);
      indicator[0] = 1;
      const Plaintext e0 = from_residues(indicator, be.params(), 0);
      for (std::size_t i = 0; i < m; ++i) {
        CiphertextHandle p = be.mult_plain(diags[i], y.cts[0]);
        p = rotate_and_sum(be, p, n, 1, false);
        p = be.mult_plain(e0, p);
        if (i > 0) p = be.rotate(p, i, RotationDirection::kRight);
        accumulate(be, acc, p);
      }
      out.plan = identity_plan(x.rows);
      break;
    }
    case Method::kColumn: {
      for (std::size_t j = 0; j < n; ++j) accumulate(be, acc, be.mult_plain(diags[j], y.cts[j]));
      out.plan = identity_plan(x.rows);
      break;
    }
    case Method::kGalaDiagonal: {
      for (std::size_t i = 0; i < diags.size(); ++i) {
        CiphertextHandle p = be.mult_plain(diags[i], y.cts[0]);
        if (i > 0) p = be.rotate(p, i, RotationDirection::kRight);
        accumulate(be, acc, p);
      }
      if (m < n) acc = rotate_and_sum(be, *acc, n, m, true);
      out.plan = identity_plan(x.rows);
      break;
    }
    case Method::kPackVflDiagonal: {
      std::vector<std::size_t> offsets;
      for (std::size_t i = 1; i < diags.size(); ++i) offsets.push_back(i);
      const auto rotated = be.hoisted_rotate(y.cts[0], offsets);
      for (std::size_t i = 0; i < diags.size(); ++i) {
        accumulate(be, acc, be.mult_plain(diags[i], i == 0 ? y.cts[0] : rotated[i - 1]));
      }
      if (m < n && options.lazy) {
        out.plan = packed_plan(x.rows, n, m, x.slots);
        out.lazy = true;
      } else {
        if (m < n) acc = rotate_and_sum(be, *acc, n, m, false);
        out.plan = identity_plan(x.rows);
      }
      break;
    }
    case Method::kGala: {
      for (std::size_t i = 0; i < diags.size(); ++i) {
        CiphertextHandle p = be.mult_plain(diags[i], y.cts[0]);
        if (i > 0) p = be.rotate(p, i, RotationDirection::kRight);
        accumulate(be, acc, p);
      }
      out.plan = packed_plan(x.rows, n, x.diagonals_per_block, x.slots);
      out.lazy = true;
      break;
    }
    case Method::kPackVfl: {
      if (!x.partition) {
        std::vector<std::size_t> offsets;
        for (std::size_t i = 1; i < diags.size(); ++i) offsets.push_back(i);
        const auto rotated = be.hoisted_rotate(y.cts[0], offsets);
        for (std::size_t i = 0; i < diags.size(); ++i) {
          accumulate(be, acc, be.mult_plain(diags[i], i == 0 ? y.cts[0] : rotated[i - 1]));
        }
        out.plan = packvfl_plan(x);
        out.lazy = true;
        break;
      }
      // Partitioned: one hoisting group per column block, shared by every row block;
      // column-block results are added before anything leaves the party.
      const PartitionPlan& plan = *x.partition;
      const std::size_t mp = x.diagonals_per_block;
      std::vector<std::vector<CiphertextHandle>> rotated(plan.col_blocks);
      std::vector<std::size_t> offsets;
      for (std::size_t i = 1; i < mp; ++i) offsets.push_back(i);
      for (std::size_t c = 0; c < plan.col_blocks; ++c) {
        rotated[c].push_back(y.cts[c]);
        for (auto& r : be.hoisted_rotate(y.cts[c], offsets)) rotated[c].push_back(std::move(r));
      }
      for (std::size_t r = 0; r < plan.row_blocks; ++r) {
        std::optional<CiphertextHandle> row_acc;
        for (std::size_t c = 0; c < plan.col_blocks; ++c) {
          std::optional<CiphertextHandle> block_acc;
          for (std::size_t i = 0; i < mp; ++i) {
            accumulate(be, block_acc, be.mult_plain(x.blocks[r][c][i], rotated[c][i]));
          }
          accumulate(be, row_acc, *block_acc);
        }
        out.ciphertexts.push_back(*row_acc);
      }
      out.plan = packvfl_plan(x);
      out.lazy = true;
      return out;
    }
    case Method::kCheetah:
      break;
  }
  out.ciphertexts.push_back(*acc);
  return out;
}

std::vector<LweHandle> matmult_cheetah(const Backend& be, const DiagonalEncodedMatrix& x, const EncryptedVector& y) {
  check_inputs(be, Method::kCheetah, x, y);
  const CiphertextHandle prod = be.mult_plain(x.diagonals().front(), y.cts.front());
  std::vector<std::size_t> idx(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) idx[i] = i * x.n + x.n - 1;
  return be.extract_lwe(prod, idx);
}

std::vector<u64> finalize_lazy_ras(const std::vector<std::vector<u64>>& decrypted, const ReductionPlan& plan,
                                   u64 plain_modulus) {
  std::size_t used = 0;
  for (const auto& refs : plan) {
    for (const SlotRef& r : refs) used = std::max(used, r.ct + 1);
  }
  if (used != decrypted.size()) {
    throw Error(ErrorCode::kPlanMismatch, "plan references " + std::to_string(used) + " ciphertexts, got " +
                                              std::to_string(decrypted.size()));
  }
  std::vector<u64> out(plan.size(), 0);
  for (std::size_t k = 0; k < plan.size(); ++k) {
    for (const SlotRef& r : plan[k]) {
      if (r.slot >= decrypted[r.ct].size()) throw Error(ErrorCode::kPlanMismatch, "slot index out of range");
      out[k] = add_mod(out[k], decrypted[r.ct][r.slot], plain_modulus);
    }
  }
  return out;
}

std::vector<std::vector<u64>> decrypt_all(const Backend& be, const std::vector<CiphertextHandle>& cts) {
  std::vector<std::vector<u64>> out;
  out.reserve(cts.size());
  for (const auto& c : cts) out.push_back(be.decrypt(c).values);
  return out;
}

std::vector<u64> reveal(const Backend& be, const PendingResult& r) {
  return finalize_lazy_ras(decrypt_all(be, r.ciphertexts), r.plan, be.params().plain_modulus);
}

std::vector<u64> inverse_ras_cleartext(std::span<const u64> v, int rounds, std::size_t slots, u64 plain_modulus,
                                       std::mt19937_64& rng) {
  if (rounds < 0 || (v.size() << rounds) > slots) {
    throw Error(ErrorCode::kCapacityExceeded, "inverse RaS needs " + std::to_string(v.size() << std::max(rounds, 0)) +
                                                  " slots, have " + std::to_string(slots));
  }
  std::vector<u64> cur(v.begin(), v.end());
  for (int r = 0; r < rounds; ++r) {
    const std::size_t len = cur.size();
    std::vector<u64> next(2 * len);
    for (std::size_t k = 0; k < len; ++k) {
      const u64 a = rng() % plain_modulus;
      next[k] = a;
      next[len + k] = sub_mod(cur[k], a, plain_modulus);
    }
    cur = std::move(next);
  }
  return cur;
}

ReductionPlan ras_plan(std::size_t length, int rounds) {
  ReductionPlan plan(length);
  const std::size_t copies = std::size_t{1} << rounds;
  for (std::size_t k = 0; k < length; ++k) {
    for (std::size_t u = 0; u < copies; ++u) plan[k].push_back(SlotRef{0, k + length * u});
  }
  return plan;
}

std::vector<std::vector<u64>> align_to_plan_cts(std::span<const u64> v, const ReductionPlan& plan,
                                                std::size_t ct_count, std::size_t slots, u64 plain_modulus,
                                                std::mt19937_64& rng) {
  if (v.size() > plan.size()) throw Error(ErrorCode::kPlanMismatch, "more values than plan outputs");
  std::vector<std::vector<u64>> out(ct_count, std::vector<u64>(slots, 0));
  for (std::size_t k = 0; k < v.size(); ++k) {
    const auto& refs = plan[k];
    if (refs.empty()) throw Error(ErrorCode::kPlanMismatch, "empty plan entry");
    for (const SlotRef& r : refs) {
      if (r.ct >= ct_count || r.slot >= slots) throw Error(ErrorCode::kPlanMismatch, "bad plan slot");
    }
    u64 rest = v[k];
    for (std::size_t u = 0; u + 1 < refs.size(); ++u) {
      const u64 a = rng() % plain_modulus;
      out[refs[u].ct][refs[u].slot] = a;
      rest = sub_mod(rest, a, plain_modulus);
    }
    out[refs.back().ct][refs.back().slot] = rest;
  }
  return out;
}

std::vector<u64> align_to_plan(std::span<const u64> v, const ReductionPlan& plan, std::size_t slots,
                               u64 plain_modulus, std::mt19937_64& rng) {
  return align_to_plan_cts(v, plan, 1, slots, plain_modulus, rng).front();
}

bool method_supports(Method method, std::size_t m, std::size_t n, std::size_t slots, std::size_t ring_degree) {
  m = next_power_of_two(m);
  n = next_power_of_two(n);
  if (method == Method::kCheetah) return m * n <= ring_degree;
  if (method == Method::kPackVfl) return true;
  return m <= slots && n <= slots;
}

ComplexityPrediction predict_complexity(Method method, std::size_t m, std::size_t n, std::size_t slots) {
  m = next_power_of_two(m);
  n = next_power_of_two(n);
  const std::size_t lo = std::min(m, n);
  const std::size_t ras = log2_ceil_ratio(n, m);
  const std::size_t mp = std::max<std::size_t>(1, ceil_div(m * n, slots));
  ComplexityPrediction p;
  p.ct_b_to_a = 1;
  p.ct_a_to_b = 1;
  auto& o = p.ops;
  switch (method) {
    case Method::kNaive: {
      const std::size_t logn = log2_exact(n);
      o = {m * logn + m - 1, 2 * m, m * logn + m - 1, 0};
      break;
    }
    case Method::kColumn:
      o = {n - 1, n, 0, 0};
      p.ct_b_to_a = n;
      break;
    case Method::kGalaDiagonal:
      o = {lo - 1 + ras, lo, lo - 1, ras};
      break;
    case Method::kPackVflDiagonal:
      o = {lo - 1 + ras, lo, ras, lo - 1};
      break;
    case Method::kGala:
      o = {mp - 1, mp, mp - 1, 0};
      break;
    case Method::kPackVfl: {
      const std::size_t s = slots;
      if (m > s && n <= s) {
        o = {(m * n - m) / s, m * n / s, 0, n - 1};
        p.ct_a_to_b = m / s;
      } else if (m <= s && n > s) {
        o = {(n * m - s) / s, m * n / s, 0, (m * n - n) / s};
        p.ct_b_to_a = n / s;
      } else if (m > s && n > s) {
        o = {(m * n * s - s * s) / (s * s), m * n / s, 0, (n * s - n) / s};
        p.ct_b_to_a = n / s;
        p.ct_a_to_b = m / s;
      } else {
        o = {mp - 1, mp, 0, mp - 1};
      }
      break;
    }
    case Method::kCheetah:
      o = {0, 1, 0, 0};
      p.ct_a_to_b = m;
      p.result_kind = CtKind::kLwe;
      break;
  }
  return p;
}

}  // namespace hevfl::matmult
