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

#include <chrono>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "hevfl/error.hpp"
#include "hevfl/matmult/matmult.hpp"
#include "hevfl/netsim/netsim.hpp"
#include "hevfl/presets.hpp"
#include "hevfl/protocols/session.hpp"
#include "hevfl/rlwe/rlwe_backend.hpp"
#include "hevfl/simd/semantic_backend.hpp"
#include "matmult_oracles.hpp"

using namespace hevfl;
using netsim::ChannelSpec;
using netsim::Message;
using netsim::Network;

namespace {

Message control(std::string from, std::string to, std::string label = "ping") {
  return Message{std::move(from), std::move(to), MessageKind::kControl, std::move(label), {}, {}, {}};
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::kConfigInvalid;
}

protocols::MatmultSessionResult session(const Backend& be, matmult::Method method, std::size_t m, std::size_t n,
                                        std::uint64_t seed = 3) {
  const std::size_t slots = be.slot_count();
  std::mt19937_64 rng(seed);
  const auto x = oracle::random_matrix(rng, m, n, 50);
  const auto y = oracle::random_vector(rng, n, 50);
  CostModel sizes;
  sizes.ring_degree = 16;
  auto r = protocols::run_matmult_session(be, method, x, y, sizes);
  const auto expect = oracle::matvec(x, y);
  CHECK(r.values == std::vector<i64>(expect.data(), expect.data() + expect.size()));
  return r;
}

protocols::MatmultSessionResult session(matmult::Method method, std::size_t m, std::size_t n, std::size_t slots,
                                        std::uint64_t seed = 3) {
  SemanticBackend be(semantic_params(slots));
  return session(be, method, m, n, seed);
}

}  // namespace

TEST_CASE("ciphertext payload bytes come from the cost model") {
  Network net({}, cost_model_for(preset("paper-122")));
  SemanticBackend be(semantic_params(8));
  Message msg{"B", "A", MessageKind::kRlweCt, "ct", {be.encrypt(encode_integers(std::vector<i64>{1}, be.params()))}, {}, {}};
  CHECK(net.payload_bytes(msg) == 262144);
  net.send(msg);
  const auto got = net.recv("A", "B");
  CHECK(got.payload_bytes == 262144);
  CHECK(got.logical_time_arrived == doctest::Approx(0.020 + 262144.0 / 50e6));
  CHECK(net.stats().direction("B", "A").rlwe_cts == 1);
}

TEST_CASE("zero-byte control message costs latency only") {
  Network net({}, {});
  net.send(control("A", "B"));
  CHECK(net.recv("B", "A").logical_time_arrived == doctest::Approx(0.020));
  CHECK(net.stats().modeled_seconds == doctest::Approx(0.020));
  CHECK(net.stats().total_bytes() == 0);
}

TEST_CASE("logical clocks advance on receive") {
  Network net({1000.0, 0.5}, {});
  net.send(Message{"A", "B", MessageKind::kCleartext, "v", {}, {}, std::vector<u64>(125, 1)});
  net.recv("B", "A");
  CHECK(net.clock("B") == doctest::Approx(1.5));
  net.send(control("B", "A"));
  net.recv("A", "B");
  CHECK(net.clock("A") == doctest::Approx(2.0));
}

TEST_CASE("channel spec rejects non-positive values") {
  CHECK(code_of([] { ChannelSpec{0.0, 0.01}.validate(); }) == ErrorCode::kConfigInvalid);
  CHECK(code_of([] { ChannelSpec{1.0, -0.01}.validate(); }) == ErrorCode::kConfigInvalid);
}

TEST_CASE("Cheetah reply inflates bytes by m(N+1)/2N") {
  // m = 4 rows at N = 16.
  const auto r = session(matmult::Method::kCheetah, 4, 4, 16);
  CostModel sizes;
  sizes.ring_degree = 16;
  const auto out = r.comm.direction("A", "B");
  CHECK(out.lwe_cts == 4);
  CHECK(static_cast<double>(out.bytes) / static_cast<double>(sizes.rlwe_ct_bytes()) == 2.125);
  CHECK(r.audit.pass);
}

TEST_CASE("column-order audit: n cts in, one out") {
  auto r = session(matmult::Method::kColumn, 4, 2, 8);
  CHECK(r.comm.direction("B", "A").rlwe_cts == 2);
  CHECK(r.comm.direction("A", "B").rlwe_cts == 1);
  CHECK(r.audit.pass);
}

TEST_CASE("packvfl wide operand audit: n/N' cts in, one out") {
  auto r = session(matmult::Method::kPackVfl, 4, 16, 8);
  CHECK(r.comm.direction("B", "A").rlwe_cts == 2);
  CHECK(r.comm.direction("A", "B").rlwe_cts == 1);
  CHECK(r.audit.pass);
}

TEST_CASE("audit itemizes mismatches") {
  auto r = session(matmult::Method::kColumn, 4, 2, 8);
  auto wrong = matmult::predict_complexity(matmult::Method::kColumn, 4, 2, 8);
  wrong.ct_b_to_a = 3;
  const auto rep = netsim::audit(r.transcript, wrong);
  CHECK_FALSE(rep.pass);
  REQUIRE(rep.mismatches.size() == 1);
  CHECK(rep.mismatches.front().find("B->A") != std::string::npos);
}

TEST_CASE("empty transcript against zero expectation passes") {
  netsim::Transcript t;
  t.seal();
  matmult::ComplexityPrediction zero;
  zero.ct_b_to_a = 0;
  CHECK(netsim::audit(t, zero).pass);
}

TEST_CASE("audit requires a sealed transcript") {
  netsim::Transcript t;
  CHECK(code_of([&] { netsim::audit(t, {}); }) == ErrorCode::kIncompleteTranscript);
}

TEST_CASE("closed network fails sends and wakes receivers") {
  Network net({}, {});
  std::thread waiter([&] { CHECK(code_of([&] { net.recv("B", "A"); }) == ErrorCode::kChannelClosed); });
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  net.close();
  waiter.join();
  CHECK(code_of([&] { net.send(control("A", "B")); }) == ErrorCode::kChannelClosed);
}

TEST_CASE("queued messages drain after close") {
  Network net({}, {});
  net.send(control("A", "B", "first"));
  net.close();
  CHECK(net.recv("B", "A").label == "first");
  CHECK(code_of([&] { net.recv("B", "A"); }) == ErrorCode::kChannelClosed);
}

TEST_CASE("channels are FIFO per direction") {
  Network net({}, {});
  for (int i = 0; i < 5; ++i) net.send(control("A", "B", std::to_string(i)));
  net.send(control("C", "B", "other"));
  CHECK(net.recv("B", "C").label == "other");
  for (int i = 0; i < 5; ++i) CHECK(net.recv("B", "A").label == std::to_string(i));
}

TEST_CASE("transcript round-trips through JSONL and detects tampering") {
  auto r = session(matmult::Method::kPackVfl, 8, 8, 8);
  const std::string text = r.transcript.to_jsonl();
  const auto back = netsim::Transcript::from_jsonl(text);
  CHECK(back.records() == r.transcript.records());
  CHECK(back.to_jsonl() == text);
  CHECK(back.sealed());

  std::string tampered = text;
  const auto pos = tampered.find("\"bytes\":");
  REQUIRE(pos != std::string::npos);
  tampered.replace(pos + 8, 1, "9");
  CHECK(code_of([&] { netsim::Transcript::from_jsonl(tampered); }) == ErrorCode::kIncompleteTranscript);

  const std::string truncated = text.substr(0, text.rfind("{\"end\""));
  CHECK(code_of([&] { netsim::Transcript::from_jsonl(truncated); }) == ErrorCode::kIncompleteTranscript);

  const auto first_nl = text.find('\n');
  const std::string dropped = text.substr(first_nl + 1);
  CHECK(code_of([&] { netsim::Transcript::from_jsonl(dropped); }) == ErrorCode::kIncompleteTranscript);
}

TEST_CASE("byte accounting does not depend on the backend") {
  for (auto method : matmult::all_methods()) {
    CAPTURE(matmult::to_string(method));
    SemanticBackend sem(semantic_params(8));
    rlwe::RlweBackend rl(rlwe::rlwe_params(16, 786433), rlwe::RlweOptions{rlwe::all_rotation_offsets(8)});
    const auto a = session(sem, method, 4, 2, 5);
    const auto b = session(rl, method, 4, 2, 5);
    CHECK(a.comm == b.comm);
    CHECK(a.transcript.to_jsonl() == b.transcript.to_jsonl());
  }
}

TEST_CASE("transcript export is replay-stable") {
  const auto a = session(matmult::Method::kPackVfl, 16, 4, 8, 9);
  const auto b = session(matmult::Method::kPackVfl, 16, 4, 8, 9);
  CHECK(a.transcript.to_jsonl() == b.transcript.to_jsonl());
}
