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

#include "hevfl/simd/semantic_backend.hpp"

namespace hevfl {

namespace {

struct SlotPayload final : CiphertextPayload {
  explicit SlotPayload(std::vector<u64> v) : values(std::move(v)) {}
  std::vector<u64> values;
};

struct ScalarPayload final : CiphertextPayload {
  explicit ScalarPayload(u64 v) : value(v) {}
  u64 value;
};

const std::vector<u64>& values_of(const CiphertextHandle& c) {
  return static_cast<const SlotPayload&>(*c.payload).values;
}

}  // namespace

SchemeParams semantic_params(std::size_t slots, std::uint64_t plain_modulus, std::uint64_t scale,
                             int max_mult_level, int modeled_log_q) {
  SchemeParams p;
  p.ring_degree = slots;
  p.slot_count = slots;
  p.plain_modulus = plain_modulus;
  p.scale = scale;
  p.max_mult_level = max_mult_level;
  p.coeff_modulus_bits = modeled_log_q;
  return p;
}

SemanticBackend::SemanticBackend(SchemeParams params) : Backend([&] {
  params.ring_degree = params.slot_count;
  return params;
}()) {}

Backend::Payload SemanticBackend::do_encrypt(const Plaintext& pt) const {
  return std::make_shared<SlotPayload>(pt.values);
}

std::vector<u64> SemanticBackend::do_decrypt(const CiphertextHandle& ct) const { return values_of(ct); }

Backend::Payload SemanticBackend::do_add(const CiphertextHandle& a, const CiphertextHandle& b) const {
  const u64 t = params().plain_modulus;
  std::vector<u64> out = values_of(a);
  const auto& bv = values_of(b);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = add_mod(out[i], bv[i], t);
  return std::make_shared<SlotPayload>(std::move(out));
}

Backend::Payload SemanticBackend::do_add_plain(const CiphertextHandle& a, const Plaintext& b) const {
  const u64 t = params().plain_modulus;
  std::vector<u64> out = values_of(a);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = add_mod(out[i], b.values[i], t);
  return std::make_shared<SlotPayload>(std::move(out));
}

Backend::Payload SemanticBackend::do_mult_plain(const Plaintext& a, const CiphertextHandle& b) const {
  const u64 t = params().plain_modulus;
  const auto& bv = values_of(b);
  const std::size_t n = bv.size();
  std::vector<u64> out(n, 0);
  if (b.domain == Domain::kSlots) {
    for (std::size_t i = 0; i < n; ++i) out[i] = mul_mod(a.values[i], bv[i], t);
  } else {
    // Negacyclic convolution in Z_t[X]/(X^N + 1); skips zero coefficients.
    for (std::size_t i = 0; i < n; ++i) {
      if (a.values[i] == 0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (bv[j] == 0) continue;
        u64 prod = mul_mod(a.values[i], bv[j], t);
        std::size_t k = i + j;
        if (k < n) {
          out[k] = add_mod(out[k], prod, t);
        } else {
          out[k - n] = sub_mod(out[k - n], prod, t);
        }
      }
    }
  }
  return std::make_shared<SlotPayload>(std::move(out));
}

Backend::Payload SemanticBackend::do_rotate_left(const CiphertextHandle& c, std::size_t offset) const {
  const auto& v = values_of(c);
  const std::size_t n = v.size();
  std::vector<u64> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = v[(j + offset) % n];
  return std::make_shared<SlotPayload>(std::move(out));
}

std::vector<Backend::Payload> SemanticBackend::do_hoisted_rotate_left(
    const CiphertextHandle& c, std::span<const std::size_t> offsets) const {
  std::vector<Payload> out;
  out.reserve(offsets.size());
  for (std::size_t off : offsets) out.push_back(do_rotate_left(c, off));
  return out;
}

std::vector<Backend::Payload> SemanticBackend::do_extract_lwe(
    const CiphertextHandle& c, std::span<const std::size_t> indices) const {
  const auto& v = values_of(c);
  std::vector<Payload> out;
  out.reserve(indices.size());
  for (std::size_t idx : indices) out.push_back(std::make_shared<ScalarPayload>(v[idx]));
  return out;
}

u64 SemanticBackend::do_decrypt_lwe(const LweHandle& lwe) const {
  return static_cast<const ScalarPayload&>(*lwe.payload).value;
}

}  // namespace hevfl
