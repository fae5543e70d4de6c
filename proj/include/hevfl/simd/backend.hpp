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

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hevfl/simd/params.hpp"
#include "hevfl/simd/plaintext.hpp"

namespace hevfl {

enum class RotationDirection { kLeft, kRight };

// Backend-specific ciphertext contents; handles share them immutably.
class CiphertextPayload {
 public:
  virtual ~CiphertextPayload() = default;
};

struct CiphertextHandle {
  std::uint64_t backend_id = 0;
  std::shared_ptr<const CiphertextPayload> payload;
  int level = 0;
  int scale_exponent = 0;
  std::size_t slot_count = 0;
  Domain domain = Domain::kSlots;
};

struct LweHandle {
  std::uint64_t backend_id = 0;
  std::shared_ptr<const CiphertextPayload> payload;
  int scale_exponent = 0;
};

// The SIMD ciphertext interface. Public entry points validate arguments,
// maintain level and scale bookkeeping, and record O1-O4 into the open
// measurement scopes; subclasses only provide the arithmetic.
//
// Rotation convention: RotL(x, i)[j] = x[(j + i) mod N'], RotR(x, i)[j] = x[(j - i) mod N'].
class Backend {
 public:
  explicit Backend(SchemeParams params);
  virtual ~Backend() = default;
  Backend(const Backend&) = delete;
  Backend& operator=(const Backend&) = delete;

  const SchemeParams& params() const { return params_; }
  std::size_t slot_count() const { return params_.slot_count; }
  std::uint64_t id() const { return id_; }
  virtual std::string name() const = 0;

  CiphertextHandle encrypt(const Plaintext& pt) const;
  Plaintext decrypt(const CiphertextHandle& ct) const;

  // O1
  CiphertextHandle add(const CiphertextHandle& a, const CiphertextHandle& b) const;
  CiphertextHandle add_plain(const CiphertextHandle& a, const Plaintext& b) const;
  CiphertextHandle sub_plain(const CiphertextHandle& a, const Plaintext& b) const;
  // O2
  CiphertextHandle mult_plain(const Plaintext& a, const CiphertextHandle& b) const;
  // O3
  CiphertextHandle rotate(const CiphertextHandle& c, std::size_t offset,
                          RotationDirection dir = RotationDirection::kLeft) const;
  // O4: one shared decomposition, one output per offset.
  std::vector<CiphertextHandle> hoisted_rotate(
      const CiphertextHandle& c, std::span<const std::size_t> offsets,
      RotationDirection dir = RotationDirection::kLeft) const;

  // Coefficient-domain LWE extraction (not an O1-O4 operation).
  std::vector<LweHandle> extract_lwe(const CiphertextHandle& c,
                                     std::span<const std::size_t> coeff_indices) const;
  u64 decrypt_lwe(const LweHandle& lwe) const;

  // Whether a left rotation by `offset` can be evaluated.
  virtual bool has_rotation(std::size_t left_offset) const = 0;

 protected:
  using Payload = std::shared_ptr<const CiphertextPayload>;

  virtual Payload do_encrypt(const Plaintext& pt) const = 0;
  virtual std::vector<u64> do_decrypt(const CiphertextHandle& ct) const = 0;
  virtual Payload do_add(const CiphertextHandle& a, const CiphertextHandle& b) const = 0;
  virtual Payload do_add_plain(const CiphertextHandle& a, const Plaintext& b) const = 0;
  virtual Payload do_mult_plain(const Plaintext& a, const CiphertextHandle& b) const = 0;
  virtual Payload do_rotate_left(const CiphertextHandle& c, std::size_t offset) const = 0;
  virtual std::vector<Payload> do_hoisted_rotate_left(const CiphertextHandle& c,
                                                      std::span<const std::size_t> offsets) const = 0;
  virtual std::vector<Payload> do_extract_lwe(const CiphertextHandle& c,
                                              std::span<const std::size_t> indices) const = 0;
  virtual u64 do_decrypt_lwe(const LweHandle& lwe) const = 0;

 private:
  void check_owned(const CiphertextHandle& c) const;
  std::size_t left_offset(std::size_t offset, RotationDirection dir) const;

  SchemeParams params_;
  std::uint64_t id_;
};

}  // namespace hevfl
