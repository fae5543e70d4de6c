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

#include "hevfl/simd/backend.hpp"

namespace hevfl {

// Cleartext simulation of the SIMD interface: a "ciphertext" is the residue
// vector itself. Arithmetic is exact modulo t, so any O1-O4 program decrypts
// to exactly the same result as the same program on cleartext vectors.
// Slot count equals ring degree.
class SemanticBackend final : public Backend {
 public:
  explicit SemanticBackend(SchemeParams params);

  std::string name() const override { return "semantic"; }
  bool has_rotation(std::size_t left_offset) const override {
    return left_offset < params().slot_count;
  }

 protected:
  Payload do_encrypt(const Plaintext& pt) const override;
  std::vector<u64> do_decrypt(const CiphertextHandle& ct) const override;
  Payload do_add(const CiphertextHandle& a, const CiphertextHandle& b) const override;
  Payload do_add_plain(const CiphertextHandle& a, const Plaintext& b) const override;
  Payload do_mult_plain(const Plaintext& a, const CiphertextHandle& b) const override;
  Payload do_rotate_left(const CiphertextHandle& c, std::size_t offset) const override;
  std::vector<Payload> do_hoisted_rotate_left(const CiphertextHandle& c,
                                              std::span<const std::size_t> offsets) const override;
  std::vector<Payload> do_extract_lwe(const CiphertextHandle& c,
                                      std::span<const std::size_t> indices) const override;
  u64 do_decrypt_lwe(const LweHandle& lwe) const override;
};

// SchemeParams for the simulation with N' = N = slots.
SchemeParams semantic_params(std::size_t slots, std::uint64_t plain_modulus = 1099511627689ULL,
                             std::uint64_t scale = 1ULL << 10, int max_mult_level = 2,
                             int modeled_log_q = 122);

}  // namespace hevfl
