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

#include "hevfl/simd/backend.hpp"

#include <algorithm>
#include <atomic>
#include <set>
#include <string>

#include "hevfl/error.hpp"
#include "hevfl/simd/metering.hpp"

namespace hevfl {

namespace {

std::atomic<std::uint64_t> next_backend_id{1};

std::size_t capacity(const SchemeParams& p, Domain d) {
  return d == Domain::kSlots ? p.slot_count : p.ring_degree;
}

}  // namespace

Backend::Backend(SchemeParams params) : params_(params), id_(next_backend_id++) {
  params_.validate();
}

void Backend::check_owned(const CiphertextHandle& c) const {
  if (c.backend_id != id_ || !c.payload) {
    throw Error(ErrorCode::kBackendMismatch, "ciphertext belongs to another backend");
  }
}

std::size_t Backend::left_offset(std::size_t offset, RotationDirection dir) const {
  if (offset >= params_.slot_count) {
    throw Error(ErrorCode::kOffsetOutOfRange,
                "offset " + std::to_string(offset) + " not below " + std::to_string(params_.slot_count));
  }
  if (dir == RotationDirection::kLeft || offset == 0) return offset;
  return params_.slot_count - offset;
}

CiphertextHandle Backend::encrypt(const Plaintext& pt) const {
  if (pt.values.size() != capacity(params_, pt.domain)) {
    throw Error(ErrorCode::kSlotCountMismatch, "plaintext length does not match backend capacity");
  }
  CiphertextHandle c;
  c.backend_id = id_;
  c.payload = do_encrypt(pt);
  c.level = params_.max_mult_level;
  c.scale_exponent = pt.scale_exponent;
  c.slot_count = params_.slot_count;
  c.domain = pt.domain;
  return c;
}

Plaintext Backend::decrypt(const CiphertextHandle& ct) const {
  check_owned(ct);
  return Plaintext{do_decrypt(ct), ct.scale_exponent, ct.domain};
}

CiphertextHandle Backend::add(const CiphertextHandle& a, const CiphertextHandle& b) const {
  check_owned(a);
  check_owned(b);
  if (a.slot_count != b.slot_count || a.domain != b.domain) {
    throw Error(ErrorCode::kSlotCountMismatch, "operands differ in slot layout");
  }
  if (a.scale_exponent != b.scale_exponent) {
    throw Error(ErrorCode::kScaleMismatch, "add: scale exponents " + std::to_string(a.scale_exponent) +
                                               " and " + std::to_string(b.scale_exponent));
  }
  CiphertextHandle r = a;
  r.payload = do_add(a, b);
  r.level = std::min(a.level, b.level);
  metering::record_ops({.add = 1});
  return r;
}

CiphertextHandle Backend::add_plain(const CiphertextHandle& a, const Plaintext& b) const {
  check_owned(a);
  if (b.values.size() != capacity(params_, a.domain) || b.domain != a.domain) {
    throw Error(ErrorCode::kSlotCountMismatch, "plaintext layout differs from ciphertext");
  }
  if (a.scale_exponent != b.scale_exponent) {
    throw Error(ErrorCode::kScaleMismatch, "add_plain: scale exponents " +
                                               std::to_string(a.scale_exponent) + " and " +
                                               std::to_string(b.scale_exponent));
  }
  CiphertextHandle r = a;
  r.payload = do_add_plain(a, b);
  metering::record_ops({.add = 1});
  return r;
}

CiphertextHandle Backend::sub_plain(const CiphertextHandle& a, const Plaintext& b) const {
  Plaintext neg = b;
  for (u64& v : neg.values) v = neg_mod(v, params_.plain_modulus);
  return add_plain(a, neg);
}

CiphertextHandle Backend::mult_plain(const Plaintext& a, const CiphertextHandle& b) const {
  check_owned(b);
  if (a.values.size() != capacity(params_, b.domain) || a.domain != b.domain) {
    throw Error(ErrorCode::kSlotCountMismatch, "plaintext layout differs from ciphertext");
  }
  if (b.level < 1) throw Error(ErrorCode::kLevelExhausted, "no multiplication level left");
  CiphertextHandle r = b;
  r.payload = do_mult_plain(a, b);
  r.level = b.level - 1;
  r.scale_exponent = a.scale_exponent + b.scale_exponent;
  metering::record_ops({.mult = 1});
  return r;
}

CiphertextHandle Backend::rotate(const CiphertextHandle& c, std::size_t offset,
                                 RotationDirection dir) const {
  check_owned(c);
  if (c.domain != Domain::kSlots) {
    throw Error(ErrorCode::kLayoutUnsupported, "rotation needs a slot-domain ciphertext");
  }
  std::size_t left = left_offset(offset, dir);
  CiphertextHandle r = c;
  r.payload = left == 0 ? c.payload : do_rotate_left(c, left);
  metering::record_ops({.rot = 1});
  return r;
}

std::vector<CiphertextHandle> Backend::hoisted_rotate(const CiphertextHandle& c,
                                                      std::span<const std::size_t> offsets,
                                                      RotationDirection dir) const {
  check_owned(c);
  if (c.domain != Domain::kSlots) {
    throw Error(ErrorCode::kLayoutUnsupported, "rotation needs a slot-domain ciphertext");
  }
  std::vector<std::size_t> left;
  left.reserve(offsets.size());
  std::set<std::size_t> seen;
  for (std::size_t off : offsets) {
    if (!seen.insert(off).second) {
      throw Error(ErrorCode::kOffsetOutOfRange, "hoisted offsets must be distinct");
    }
    left.push_back(left_offset(off, dir));
  }
  std::vector<CiphertextHandle> out;
  if (left.empty()) return out;
  std::vector<std::size_t> nonzero;
  for (std::size_t l : left) {
    if (l != 0) nonzero.push_back(l);
  }
  std::vector<Payload> rotated = nonzero.empty() ? std::vector<Payload>{}
                                                 : do_hoisted_rotate_left(c, nonzero);
  out.reserve(left.size());
  std::size_t k = 0;
  for (std::size_t l : left) {
    CiphertextHandle r = c;
    r.payload = l == 0 ? c.payload : rotated[k++];
    out.push_back(std::move(r));
  }
  metering::record_ops({.hst_rot = left.size()});
  return out;
}

std::vector<LweHandle> Backend::extract_lwe(const CiphertextHandle& c,
                                            std::span<const std::size_t> coeff_indices) const {
  check_owned(c);
  if (c.domain != Domain::kCoefficients) {
    throw Error(ErrorCode::kLayoutUnsupported, "LWE extraction needs a coefficient-domain ciphertext");
  }
  for (std::size_t idx : coeff_indices) {
    if (idx >= params_.ring_degree) {
      throw Error(ErrorCode::kIndexOutOfRange, "coefficient index " + std::to_string(idx));
    }
  }
  auto payloads = do_extract_lwe(c, coeff_indices);
  std::vector<LweHandle> out;
  out.reserve(payloads.size());
  for (auto& p : payloads) out.push_back(LweHandle{id_, std::move(p), c.scale_exponent});
  return out;
}

u64 Backend::decrypt_lwe(const LweHandle& lwe) const {
  if (lwe.backend_id != id_ || !lwe.payload) {
    throw Error(ErrorCode::kBackendMismatch, "LWE ciphertext belongs to another backend");
  }
  return do_decrypt_lwe(lwe);
}

}  // namespace hevfl
