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

#include "hevfl/rlwe/rlwe_backend.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "hevfl/error.hpp"

namespace hevfl::rlwe {

namespace {

struct RlwePayload final : CiphertextPayload {
  RnsPoly c0;  // coefficient form
  RnsPoly c1;
};

struct LwePayload final : CiphertextPayload {
  std::vector<std::vector<u64>> a;  // per limb
  std::vector<u64> b;
};

const RlwePayload& rlwe_of(const CiphertextHandle& c) { return static_cast<const RlwePayload&>(*c.payload); }

double log2_u128(u128 v) {
  if (v == 0) return 0.0;
  return std::log2(static_cast<long double>(v));
}

// Centered binomial, variance 10.5.
i64 sample_error(std::mt19937_64& rng) {
  const u64 r = rng();
  return std::popcount(r & 0x1FFFFFULL) - std::popcount((r >> 21) & 0x1FFFFFULL);
}

std::vector<i64> sample_ternary(std::mt19937_64& rng, std::size_t n) {
  std::vector<i64> out(n);
  for (auto& v : out) v = static_cast<i64>(rng() % 3) - 1;
  return out;
}

std::vector<i64> sample_errors(std::mt19937_64& rng, std::size_t n) {
  std::vector<i64> out(n);
  for (auto& v : out) v = sample_error(rng);
  return out;
}

RnsPoly sample_uniform_ntt(const RlweContext& ctx, std::mt19937_64& rng) {
  RnsPoly p = ctx.zero();
  for (std::size_t j = 0; j < ctx.limb_count(); ++j) {
    const u64 q = ctx.modulus(j).value();
    for (auto& v : p[j]) v = rng() % q;
  }
  return p;
}

void add_into(const RlweContext& ctx, RnsPoly& acc, const RnsPoly& x) {
  for (std::size_t j = 0; j < ctx.limb_count(); ++j) {
    const Modulus& m = ctx.modulus(j);
    for (std::size_t k = 0; k < acc[j].size(); ++k) acc[j][k] = m.add(acc[j][k], x[j][k]);
  }
}

// Pointwise product of NTT-form polynomials.
RnsPoly mul_ntt(const RlweContext& ctx, const RnsPoly& a, const RnsPoly& b) {
  RnsPoly out = a;
  for (std::size_t j = 0; j < ctx.limb_count(); ++j) {
    const Modulus& m = ctx.modulus(j);
    for (std::size_t k = 0; k < out[j].size(); ++k) out[j][k] = m.mul(out[j][k], b[j][k]);
  }
  return out;
}

}  // namespace

RlweContext::RlweContext(std::size_t ring_degree, u64 plain_modulus, int limb_bits, int limb_count)
    : n_(ring_degree), t_(plain_modulus) {
  if (!is_power_of_two(n_) || n_ < 4) {
    throw Error(ErrorCode::kConfigInvalid, "ring degree must be a power of two >= 4");
  }
  if (t_ < 3 || !is_prime(t_) || (t_ - 1) % (2 * n_) != 0) {
    throw Error(ErrorCode::kBadModulus, "plain modulus " + std::to_string(t_) +
                                            " is not a prime congruent to 1 mod " + std::to_string(2 * n_));
  }
  plain_tables_ = ntt_tables(n_, t_);

  std::vector<u64> primes;
  for (int j = 0; j < limb_count; ++j) {
    std::vector<u64> exclude = primes;
    exclude.push_back(t_);
    primes.push_back(find_ntt_prime(limb_bits, 2 * n_, exclude));
  }
  double bits = 0;
  for (u64 p : primes) bits += std::log2(static_cast<double>(p));
  if (bits + std::log2(static_cast<double>(t_)) >= 127.0) {
    throw Error(ErrorCode::kBadModulus, "t * q does not fit in 127 bits");
  }
  for (u64 p : primes) {
    tables_.push_back(ntt_tables(n_, p));
    q_ *= p;
  }
  const u128 delta = q_ / t_;
  u128 prefix = 1;
  for (u64 p : primes) {
    delta_mod_.push_back(static_cast<u64>(delta % p));
    garner_inv_.push_back(inv_mod(static_cast<u64>(prefix % p), p));
    prefix *= p;
  }

  const std::size_t two_n = 2 * n_;
  slot_index_.resize(n_ / 2);
  mirror_index_.resize(n_ / 2);
  std::size_t e = 1;
  for (std::size_t i = 0; i < n_ / 2; ++i) {
    slot_index_[i] = (e - 1) / 2;
    mirror_index_[i] = (two_n - e - 1) / 2;
    e = e * 3 % two_n;
  }
}

double RlweContext::log2_q() const { return log2_u128(q_); }

std::vector<u64> RlweContext::batch_encode(std::span<const u64> slots) const {
  std::vector<u64> evals(n_, 0);
  for (std::size_t i = 0; i < slots.size() && i < n_ / 2; ++i) {
    evals[slot_index_[i]] = slots[i] % t_;
    evals[mirror_index_[i]] = slots[i] % t_;
  }
  plain_tables_->inverse(evals);
  return evals;
}

std::vector<u64> RlweContext::batch_decode(std::vector<u64> coeffs) const {
  plain_tables_->forward(coeffs);
  std::vector<u64> out(n_ / 2);
  for (std::size_t i = 0; i < n_ / 2; ++i) out[i] = coeffs[slot_index_[i]];
  return out;
}

std::size_t RlweContext::galois_element(std::size_t left_offset) const {
  return static_cast<std::size_t>(pow_mod(3, left_offset, 2 * n_));
}

u128 RlweContext::compose(const RnsPoly& p, std::size_t k) const {
  u128 x = p[0][k];
  u128 prefix = modulus(0).value();
  for (std::size_t j = 1; j < limb_count(); ++j) {
    const Modulus& m = modulus(j);
    const u64 xj = static_cast<u64>(x % m.value());
    const u64 c = m.mul(m.sub(p[j][k], xj), garner_inv_[j]);
    x += prefix * c;
    prefix *= m.value();
  }
  return x;
}

u64 RlweContext::scale_down(u128 x) const {
  const u128 r = (x * t_ + q_ / 2) / q_;
  return static_cast<u64>(r % t_);
}

RnsPoly RlweContext::zero() const { return RnsPoly(limb_count(), std::vector<u64>(n_, 0)); }

RnsPoly RlweContext::lift_small(std::span<const i64> coeffs) const {
  RnsPoly p = zero();
  for (std::size_t j = 0; j < limb_count(); ++j) {
    const Modulus& m = modulus(j);
    for (std::size_t k = 0; k < n_; ++k) p[j][k] = m.from_signed(coeffs[k]);
  }
  return p;
}

void RlweContext::forward(RnsPoly& p) const {
  for (std::size_t j = 0; j < limb_count(); ++j) tables_[j]->forward(p[j]);
}

void RlweContext::inverse(RnsPoly& p) const {
  for (std::size_t j = 0; j < limb_count(); ++j) tables_[j]->inverse(p[j]);
}

std::shared_ptr<const KeyMaterial> keygen(const RlweContext& ctx, std::span<const std::size_t> rot_offsets,
                                          std::uint64_t seed, int decomposition_bits) {
  if (decomposition_bits < 1 || decomposition_bits > 30) {
    throw Error(ErrorCode::kConfigInvalid, "decomposition base out of range");
  }
  std::mt19937_64 rng(seed);
  const std::size_t n = ctx.ring_degree();
  auto keys = std::make_shared<KeyMaterial>();
  keys->decomposition_bits = decomposition_bits;
  int max_bits = 0;
  for (std::size_t j = 0; j < ctx.limb_count(); ++j) {
    max_bits = std::max(max_bits, static_cast<int>(std::bit_width(ctx.modulus(j).value())));
  }
  keys->digits_per_limb = static_cast<std::size_t>((max_bits + decomposition_bits - 1) / decomposition_bits);

  keys->secret = sample_ternary(rng, n);
  keys->secret_ntt = ctx.lift_small(keys->secret);
  ctx.forward(keys->secret_ntt);

  keys->pk1_ntt = sample_uniform_ntt(ctx, rng);
  RnsPoly e = ctx.lift_small(sample_errors(rng, n));
  ctx.forward(e);
  RnsPoly as = mul_ntt(ctx, keys->pk1_ntt, keys->secret_ntt);
  keys->pk0_ntt = ctx.zero();
  for (std::size_t j = 0; j < ctx.limb_count(); ++j) {
    const Modulus& m = ctx.modulus(j);
    for (std::size_t k = 0; k < n; ++k) keys->pk0_ntt[j][k] = m.sub(e[j][k], as[j][k]);
  }

  for (std::size_t offset : rot_offsets) {
    if (offset == 0 || offset >= ctx.slot_count() || keys->galois_keys.count(offset)) continue;
    GaloisKey gk;
    gk.galois_elt = ctx.galois_element(offset);
    gk.perm = ctx.tables(0).automorphism_permutation(gk.galois_elt);
    // sigma_g(s) in NTT form is a permutation of NTT(s).
    RnsPoly s_rot = ctx.zero();
    for (std::size_t j = 0; j < ctx.limb_count(); ++j) {
      for (std::size_t k = 0; k < n; ++k) s_rot[j][k] = keys->secret_ntt[j][gk.perm[k]];
    }
    for (std::size_t i = 0; i < ctx.limb_count(); ++i) {
      const Modulus& mi = ctx.modulus(i);
      u64 power = 1;
      for (std::size_t b = 0; b < keys->digits_per_limb; ++b) {
        RnsPoly a = sample_uniform_ntt(ctx, rng);
        RnsPoly err = ctx.lift_small(sample_errors(rng, n));
        ctx.forward(err);
        RnsPoly k0 = ctx.zero();
        for (std::size_t j = 0; j < ctx.limb_count(); ++j) {
          const Modulus& m = ctx.modulus(j);
          for (std::size_t k = 0; k < n; ++k) {
            u64 v = m.sub(err[j][k], m.mul(a[j][k], keys->secret_ntt[j][k]));
            // The gadget element is B^b on limb i and zero elsewhere.
            if (j == i) v = m.add(v, m.mul(s_rot[j][k], power));
            k0[j][k] = v;
          }
        }
        gk.k0.push_back(std::move(k0));
        gk.k1.push_back(std::move(a));
        power = mi.mul(power, (1ULL << decomposition_bits) % mi.value());
      }
    }
    keys->galois_keys.emplace(offset, std::move(gk));
  }
  return keys;
}

std::vector<std::size_t> all_rotation_offsets(std::size_t slot_count) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i < slot_count; ++i) out.push_back(i);
  return out;
}

SchemeParams rlwe_params(std::size_t ring_degree, std::uint64_t plain_modulus, std::uint64_t scale,
                         int max_mult_level) {
  SchemeParams p;
  p.ring_degree = ring_degree;
  p.slot_count = ring_degree / 2;
  p.plain_modulus = plain_modulus;
  p.scale = scale;
  p.max_mult_level = max_mult_level;
  p.coeff_modulus_bits = 106;
  return p;
}

RlweBackend::RlweBackend(SchemeParams params, RlweOptions options)
    : Backend([&] {
        params.slot_count = params.ring_degree / 2;
        return params;
      }()),
      rng_(options.seed ^ 0x9e3779b97f4a7c15ULL) {
  ctx_ = std::make_shared<RlweContext>(params.ring_degree, params.plain_modulus, options.limb_bits,
                                       options.limb_count);
  keys_ = keygen(*ctx_, options.rotation_offsets, options.seed, options.decomposition_bits);
}

bool RlweBackend::has_rotation(std::size_t left_offset) const {
  return left_offset == 0 || keys_->galois_keys.count(left_offset) > 0;
}

std::vector<u64> RlweBackend::plain_poly(const Plaintext& pt) const {
  if (pt.domain == Domain::kSlots) return ctx_->batch_encode(pt.values);
  std::vector<u64> out(ctx_->ring_degree());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = pt.values[k] % ctx_->plain_modulus();
  return out;
}

Backend::Payload RlweBackend::do_encrypt(const Plaintext& pt) const {
  const RlweContext& ctx = *ctx_;
  const std::size_t n = ctx.ring_degree();
  std::vector<i64> u, e0, e1;
  {
    std::lock_guard<std::mutex> lock(rng_mu_);
    u = sample_ternary(rng_, n);
    e0 = sample_errors(rng_, n);
    e1 = sample_errors(rng_, n);
  }
  RnsPoly u_ntt = ctx.lift_small(u);
  ctx.forward(u_ntt);
  auto out = std::make_shared<RlwePayload>();
  out->c0 = mul_ntt(ctx, keys_->pk0_ntt, u_ntt);
  out->c1 = mul_ntt(ctx, keys_->pk1_ntt, u_ntt);
  ctx.inverse(out->c0);
  ctx.inverse(out->c1);
  add_into(ctx, out->c0, ctx.lift_small(e0));
  add_into(ctx, out->c1, ctx.lift_small(e1));
  const std::vector<u64> m = plain_poly(pt);
  for (std::size_t j = 0; j < ctx.limb_count(); ++j) {
    const Modulus& mod = ctx.modulus(j);
    for (std::size_t k = 0; k < n; ++k) {
      out->c0[j][k] = mod.add(out->c0[j][k], mod.mul(m[k], ctx.delta_mod(j)));
    }
  }
  return out;
}

std::vector<u128> RlweBackend::phase(const CiphertextHandle& ct) const {
  const RlweContext& ctx = *ctx_;
  const auto& p = rlwe_of(ct);
  RnsPoly c1s = p.c1;
  ctx.forward(c1s);
  c1s = mul_ntt(ctx, c1s, keys_->secret_ntt);
  ctx.inverse(c1s);
  add_into(ctx, c1s, p.c0);
  std::vector<u128> out(ctx.ring_degree());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = ctx.compose(c1s, k);
  return out;
}

std::vector<u64> RlweBackend::do_decrypt(const CiphertextHandle& ct) const {
  const std::vector<u128> x = phase(ct);
  std::vector<u64> m(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) m[k] = ctx_->scale_down(x[k]);
  if (ct.domain == Domain::kSlots) return ctx_->batch_decode(std::move(m));
  return m;
}

double RlweBackend::noise_budget_bits(const CiphertextHandle& ct) const {
  const std::vector<u128> x = phase(ct);
  const u128 q = ctx_->q();
  const u64 t = ctx_->plain_modulus();
  u128 worst = 0;
  for (u128 v : x) {
    // t*x = q*m + t*noise (mod q*t); the residue of t*x mod q measures the noise.
    const u128 r = (v * t) % q;
    const u128 dist = r > q / 2 ? q - r : r;
    if (dist > worst) worst = dist;
  }
  return log2_u128(q) - 1.0 - log2_u128(worst + 1);
}

Backend::Payload RlweBackend::do_add(const CiphertextHandle& a, const CiphertextHandle& b) const {
  auto out = std::make_shared<RlwePayload>(rlwe_of(a));
  add_into(*ctx_, out->c0, rlwe_of(b).c0);
  add_into(*ctx_, out->c1, rlwe_of(b).c1);
  return out;
}

Backend::Payload RlweBackend::do_add_plain(const CiphertextHandle& a, const Plaintext& b) const {
  const RlweContext& ctx = *ctx_;
  auto out = std::make_shared<RlwePayload>(rlwe_of(a));
  const std::vector<u64> m = plain_poly(b);
  for (std::size_t j = 0; j < ctx.limb_count(); ++j) {
    const Modulus& mod = ctx.modulus(j);
    for (std::size_t k = 0; k < m.size(); ++k) {
      out->c0[j][k] = mod.add(out->c0[j][k], mod.mul(m[k], ctx.delta_mod(j)));
    }
  }
  return out;
}

Backend::Payload RlweBackend::do_mult_plain(const Plaintext& a, const CiphertextHandle& b) const {
  const RlweContext& ctx = *ctx_;
  const std::vector<u64> m = plain_poly(a);
  std::vector<i64> centered_m(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) centered_m[k] = centered(m[k], ctx.plain_modulus());
  RnsPoly p = ctx.lift_small(centered_m);
  ctx.forward(p);
  auto out = std::make_shared<RlwePayload>(rlwe_of(b));
  for (RnsPoly* c : {&out->c0, &out->c1}) {
    ctx.forward(*c);
    *c = mul_ntt(ctx, *c, p);
    ctx.inverse(*c);
  }
  return out;
}

Backend::Payload RlweBackend::do_rotate_left(const CiphertextHandle& c, std::size_t offset) const {
  const std::size_t offsets[] = {offset};
  return do_hoisted_rotate_left(c, offsets).front();
}

std::vector<Backend::Payload> RlweBackend::do_hoisted_rotate_left(const CiphertextHandle& c,
                                                                  std::span<const std::size_t> offsets) const {
  const RlweContext& ctx = *ctx_;
  const KeyMaterial& keys = *keys_;
  std::vector<const GaloisKey*> gks;
  for (std::size_t off : offsets) {
    auto it = keys.galois_keys.find(off);
    if (it == keys.galois_keys.end()) {
      throw Error(ErrorCode::kMissingGaloisKey, "no Galois key for left offset " + std::to_string(off));
    }
    gks.push_back(&it->second);
  }
  const auto& in = rlwe_of(c);
  const std::size_t n = ctx.ring_degree();
  const std::size_t limbs = ctx.limb_count();
  const int bits = keys.decomposition_bits;
  const u64 mask = (1ULL << bits) - 1;

  // Shared part: digit decomposition of c1 and the forward NTTs of every digit.
  std::vector<RnsPoly> digits;
  digits.reserve(limbs * keys.digits_per_limb);
  for (std::size_t i = 0; i < limbs; ++i) {
    for (std::size_t b = 0; b < keys.digits_per_limb; ++b) {
      RnsPoly d = ctx.zero();
      const int shift = static_cast<int>(b) * bits;
      for (std::size_t k = 0; k < n; ++k) {
        const u64 digit = shift < 64 ? (in.c1[i][k] >> shift) & mask : 0;
        for (std::size_t j = 0; j < limbs; ++j) d[j][k] = digit;
      }
      ctx.forward(d);
      digits.push_back(std::move(d));
    }
  }

  std::vector<Payload> out;
  out.reserve(offsets.size());
  for (const GaloisKey* gk : gks) {
    RnsPoly acc0 = ctx.zero();
    RnsPoly acc1 = ctx.zero();
    for (std::size_t d = 0; d < digits.size(); ++d) {
      for (std::size_t j = 0; j < limbs; ++j) {
        const Modulus& m = ctx.modulus(j);
        const auto& dj = digits[d][j];
        const auto& k0 = gk->k0[d][j];
        const auto& k1 = gk->k1[d][j];
        auto& a0 = acc0[j];
        auto& a1 = acc1[j];
        for (std::size_t k = 0; k < n; ++k) {
          const u64 v = dj[gk->perm[k]];
          a0[k] = m.add(a0[k], m.mul(v, k0[k]));
          a1[k] = m.add(a1[k], m.mul(v, k1[k]));
        }
      }
    }
    ctx.inverse(acc0);
    ctx.inverse(acc1);
    auto r = std::make_shared<RlwePayload>();
    r->c0 = ctx.zero();
    for (std::size_t j = 0; j < limbs; ++j) {
      r->c0[j] = apply_automorphism(in.c0[j], gk->galois_elt, ctx.modulus(j).value());
    }
    add_into(ctx, r->c0, acc0);
    r->c1 = std::move(acc1);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Backend::Payload> RlweBackend::do_extract_lwe(const CiphertextHandle& c,
                                                          std::span<const std::size_t> indices) const {
  const RlweContext& ctx = *ctx_;
  const auto& in = rlwe_of(c);
  const std::size_t n = ctx.ring_degree();
  std::vector<Payload> out;
  out.reserve(indices.size());
  for (std::size_t idx : indices) {
    auto lwe = std::make_shared<LwePayload>();
    lwe->a.assign(ctx.limb_count(), std::vector<u64>(n));
    lwe->b.resize(ctx.limb_count());
    for (std::size_t j = 0; j < ctx.limb_count(); ++j) {
      const u64 q = ctx.modulus(j).value();
      lwe->b[j] = in.c0[j][idx];
      for (std::size_t i = 0; i < n; ++i) {
        lwe->a[j][i] = i <= idx ? in.c1[j][idx - i] : neg_mod(in.c1[j][n + idx - i], q);
      }
    }
    out.push_back(std::move(lwe));
  }
  return out;
}

u64 RlweBackend::do_decrypt_lwe(const LweHandle& lwe) const {
  const RlweContext& ctx = *ctx_;
  const auto& p = static_cast<const LwePayload&>(*lwe.payload);
  RnsPoly phase(ctx.limb_count(), std::vector<u64>(1));
  for (std::size_t j = 0; j < ctx.limb_count(); ++j) {
    const Modulus& m = ctx.modulus(j);
    u64 acc = p.b[j];
    for (std::size_t i = 0; i < p.a[j].size(); ++i) {
      const i64 s = keys_->secret[i];
      if (s == 1) acc = m.add(acc, p.a[j][i]);
      if (s == -1) acc = m.sub(acc, p.a[j][i]);
    }
    phase[j][0] = acc;
  }
  return ctx.scale_down(ctx.compose(phase, 0));
}

}  // namespace hevfl::rlwe
