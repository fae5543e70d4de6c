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

#include "hevfl/protocols/session.hpp"

#include <chrono>

#include "hevfl/matmult/encode.hpp"
#include "hevfl/matmult/matmult.hpp"
#include "hevfl/protocols/common.hpp"

namespace hevfl::protocols {

MatmultSessionResult run_matmult_session(const Backend& be, matmult::Method method, const IMat& x, const IVec& y,
                                         const CostModel& sizes, const netsim::ChannelSpec& spec) {
  using matmult::Method;
  const u64 t = be.params().plain_modulus;
  const auto start = std::chrono::steady_clock::now();
  netsim::Network net(spec, sizes);
  const auto enc = matmult::encode_for(method, x, be.params());
  const matmult::VectorLayout layout = matmult::required_layout(enc);
  MatmultSessionResult r;
  matmult::ReductionPlan plan;

  auto owner = [&] {
    const auto msg = expect(net, "A", "B", "y");
    const matmult::EncryptedVector cy{layout, msg.cts};
    MeasureScope scope;
    if (method == Method::kCheetah) {
      auto lwes = matmult::matmult_cheetah(be, enc, cy);
      r.ops = scope.measure().ops;
      netsim::Message out{"A", "B", MessageKind::kLweCtBatch, "result", {}, std::move(lwes), {}};
      net.send(std::move(out));
      return;
    }
    auto res = matmult::matmult(be, method, enc, cy);
    r.ops = scope.measure().ops;
    plan = res.plan;
    send_cts(net, "A", "B", "result", std::move(res.ciphertexts));
  };

  auto key_owner = [&] {
    send_cts(net, "B", "A", "y", matmult::encrypt_vector(be, y, layout).cts);
    const auto msg = expect(net, "B", "A", "result");
    if (method == Method::kCheetah) {
      for (const auto& l : msg.lwes) r.values.push_back(centered(be.decrypt_lwe(l), t));
      return;
    }
    for (u64 v : matmult::finalize_lazy_ras(matmult::decrypt_all(be, msg.cts), plan, t)) {
      r.values.push_back(centered(v, t));
    }
  };

  run_parties(net, {owner, key_owner});
  r.values.resize(static_cast<std::size_t>(x.rows()));
  net.transcript().seal();
  r.transcript = net.transcript();
  r.comm = net.stats();
  r.audit = netsim::audit(r.transcript, matmult::predict_complexity(method, static_cast<std::size_t>(x.rows()),
                                                                     static_cast<std::size_t>(x.cols()), be.slot_count()));
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace hevfl::protocols
