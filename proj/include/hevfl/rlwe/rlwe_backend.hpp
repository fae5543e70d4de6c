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
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <span>
#include <vector>

#include "hevfl/rlwe/ntt.hpp"
#include "hevfl/simd/backend.hpp"

namespace hevfl::rlwe {

// Residues of one polynomial: limbs[j][k] is coefficient (or evaluation) k mod q_j.
using RnsPoly = std::vector<std::vector<u64>>;

// Ring and plaintext-batching data shared by keys and ciphertexts.
//
// The ciphertext modulus q is a product of NTT primes; decryption rounds
// t*x/q in 128-bit arithmetic, so t*q must stay below 2^127. Batching uses
// the Galois orbit of 3: slot i sits at the evaluation point psi^(3^i), and
// the mirrored point psi^(-3^i) carries a copy of the same value, which makes
// every automorphism X -> X^(3^k) a cyclic rotation of N/2 slots.
class RlweContext {
 public:
  RlweContext(std::size_t ring_degree, u64 plain_modulus, int limb_bits = 53, int limb_count = 2);

  std::size_t ring_degree() const { return n_; }
  std::size_t slot_count() const { return n_ / 2; }
  u64 plain_modulus() const { return t_; }
  std::size_t limb_count() const { return tables_.size(); }
  const Modulus& modulus(std::size_t j) const { return tables_[j]->modulus(); }
  const NttTables& tables(std::size_t j) const { return *tables_[j]; }
  u128 q() const { return q_; }
  double log2_q() const;

  // Slot vector (length N/2, residues mod t) <-> plaintext polynomial coefficients mod t.
  std::vector<u64> batch_encode(std::span<const u64> slots) const;
  std::vector<u64> batch_decode(std::vector<u64> coeffs) const;

  std::size_t galois_element(std::size_t left_offset) const;

  // x in [0, q) from its residues at coefficient k.
  u128 compose(const RnsPoly& p, std::size_t k) const;
  // round(t * x / q) mod t.
  u64 scale_down(u128 x) const;
  u64 delta_mod(std::size_t j) const { return delta_mod_[j]; }

  RnsPoly zero() const;
  RnsPoly lift_small(std::span<const i64> coeffs) const;
  void forward(RnsPoly& p) const;
  void inverse(RnsPoly& p) const;

 private:
  std::size_t n_;
  u64 t_;
  u128 q_ = 1;
  std::vector<std::shared_ptr<const NttTables>> tables_;
  std::shared_ptr<const NttTables> plain_tables_;
  std::vector<u64> delta_mod_;
  std::vector<u64> garner_inv_;  // (q_0 ... q_{j-1})^{-1} mod q_j
  std::vector<std::size_t> slot_index_;    // NTT index of psi^(3^i)
  std::vector<std::size_t> mirror_index_;  // NTT index of psi^(-3^i)
};

struct GaloisKey {
  std::size_t galois_elt = 0;
  std::vector<std::size_t> perm;  // evaluation-domain permutation of sigma_g
  // One (k0, k1) pair per (limb, digit), NTT form.
  std::vector<RnsPoly> k0;
  std::vector<RnsPoly> k1;
};

struct KeyMaterial {
  std::vector<i64> secret;  // ternary
  RnsPoly secret_ntt;
  RnsPoly pk0_ntt;  // -a*s + e
  RnsPoly pk1_ntt;  // a
  std::map<std::size_t, GaloisKey> galois_keys;  // keyed by left rotation offset
  int decomposition_bits = 8;
  std::size_t digits_per_limb = 0;
};

// Throws BadModulus (through RlweContext) when t is not a prime = 1 mod 2N.
std::shared_ptr<const KeyMaterial> keygen(const RlweContext& ctx,
                                          std::span<const std::size_t> rot_offsets,
                                          std::uint64_t seed, int decomposition_bits = 8);

struct RlweOptions {
  std::vector<std::size_t> rotation_offsets;  // left offsets that get Galois keys
  std::uint64_t seed = 0x5eed;
  int decomposition_bits = 8;
  int limb_bits = 53;
  int limb_count = 2;
};

// All left offsets 1..N'-1; convenient for small rings.
std::vector<std::size_t> all_rotation_offsets(std::size_t slot_count);

// BFV-style backend. slot_count is forced to ring_degree / 2.
class RlweBackend final : public Backend {
 public:
  RlweBackend(SchemeParams params, RlweOptions options);

  std::string name() const override { return "rlwe"; }
  bool has_rotation(std::size_t left_offset) const override;

  const RlweContext& context() const { return *ctx_; }
  const KeyMaterial& keys() const { return *keys_; }

  // Remaining invariant-noise budget in bits; decryption is correct while positive.
  double noise_budget_bits(const CiphertextHandle& ct) const;

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

 private:
  std::vector<u64> plain_poly(const Plaintext& pt) const;
  // c0 + c1*s composed to [0, q) per coefficient.
  std::vector<u128> phase(const CiphertextHandle& ct) const;

  std::shared_ptr<const RlweContext> ctx_;
  std::shared_ptr<const KeyMaterial> keys_;
  mutable std::mutex rng_mu_;
  mutable std::mt19937_64 rng_;
};

SchemeParams rlwe_params(std::size_t ring_degree, std::uint64_t plain_modulus,
                         std::uint64_t scale = 1ULL << 4, int max_mult_level = 2);

}  // namespace hevfl::rlwe
