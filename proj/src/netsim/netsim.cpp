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

#include "hevfl/netsim/netsim.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "hevfl/error.hpp"

namespace hevfl::netsim {

namespace {

using ordered_json = nlohmann::ordered_json;

std::uint64_t fnv1a(std::uint64_t h, const std::string& s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

MessageKind kind_from_string(const std::string& s) {
  for (MessageKind k : {MessageKind::kRlweCt, MessageKind::kLweCtBatch, MessageKind::kCleartext, MessageKind::kControl}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorCode::kIncompleteTranscript, "unknown message kind '" + s + "'");
}

ordered_json to_json(const TranscriptRecord& r, std::size_t seq) {
  ordered_json j;
  j["seq"] = seq;
  j["sender"] = r.sender;
  j["receiver"] = r.receiver;
  j["kind"] = to_string(r.kind);
  j["label"] = r.label;
  j["bytes"] = r.bytes;
  j["ct_count"] = r.ct_count;
  j["sent"] = r.sent;
  j["arrived"] = r.arrived;
  j["channel_seq"] = r.channel_seq;
  j["ops"] = {{"add", r.sender_ops.add}, {"mult", r.sender_ops.mult}, {"rot", r.sender_ops.rot},
              {"hst_rot", r.sender_ops.hst_rot}};
  return j;
}

TranscriptRecord from_json(const ordered_json& j) {
  TranscriptRecord r;
  r.sender = j.at("sender").get<std::string>();
  r.receiver = j.at("receiver").get<std::string>();
  r.kind = kind_from_string(j.at("kind").get<std::string>());
  r.label = j.at("label").get<std::string>();
  r.bytes = j.at("bytes").get<std::uint64_t>();
  r.ct_count = j.at("ct_count").get<std::uint64_t>();
  r.sent = j.at("sent").get<double>();
  r.arrived = j.at("arrived").get<double>();
  r.channel_seq = j.at("channel_seq").get<std::uint64_t>();
  const auto& ops = j.at("ops");
  r.sender_ops = OpCounter{ops.at("add").get<std::uint64_t>(), ops.at("mult").get<std::uint64_t>(),
                           ops.at("rot").get<std::uint64_t>(), ops.at("hst_rot").get<std::uint64_t>()};
  return r;
}

}  // namespace

void ChannelSpec::validate() const {
  if (!(bandwidth > 0.0) || !(latency > 0.0)) {
    throw Error(ErrorCode::kConfigInvalid, "channel bandwidth and latency must be positive");
  }
}

Transcript::Transcript(const Transcript& other) {
  std::lock_guard<std::mutex> lock(other.mu_);
  records_ = other.records_;
  sealed_ = other.sealed_;
}

Transcript& Transcript::operator=(const Transcript& other) {
  if (this == &other) return *this;
  std::scoped_lock lock(mu_, other.mu_);
  records_ = other.records_;
  sealed_ = other.sealed_;
  return *this;
}

void Transcript::append(TranscriptRecord r) {
  std::lock_guard<std::mutex> lock(mu_);
  records_.push_back(std::move(r));
}

void Transcript::seal() {
  std::lock_guard<std::mutex> lock(mu_);
  sealed_ = true;
}

bool Transcript::sealed() const {
  std::lock_guard<std::mutex> lock(mu_);
  return sealed_;
}

std::vector<TranscriptRecord> Transcript::records() const {
  std::vector<TranscriptRecord> out;
  {
    std::lock_guard<std::mutex> lock(mu_);
    out = records_;
  }
  std::stable_sort(out.begin(), out.end(), [](const TranscriptRecord& a, const TranscriptRecord& b) {
    return std::tie(a.sent, a.sender, a.receiver, a.channel_seq) <
           std::tie(b.sent, b.sender, b.receiver, b.channel_seq);
  });
  return out;
}

CommStats Transcript::stats(const ChannelSpec& spec) const {
  CommStats s;
  for (const auto& r : records()) {
    DirectionStats& d = s.directions[CommStats::key(r.sender, r.receiver)];
    d.bytes += r.bytes;
    d.messages += 1;
    if (r.kind == MessageKind::kRlweCt) d.rlwe_cts += r.ct_count;
    if (r.kind == MessageKind::kLweCtBatch) d.lwe_cts += r.ct_count;
    s.modeled_seconds += spec.transfer_seconds(r.bytes);
  }
  return s;
}

std::string Transcript::to_jsonl() const {
  std::ostringstream os;
  std::uint64_t digest = kFnvOffset;
  const auto recs = records();
  for (std::size_t i = 0; i < recs.size(); ++i) {
    ordered_json j = to_json(recs[i], i);
    digest = fnv1a(digest, j.dump());
    j["digest"] = hex(digest);
    os << j.dump() << '\n';
  }
  if (sealed()) {
    ordered_json end;
    end["end"] = true;
    end["records"] = recs.size();
    end["digest"] = hex(digest);
    os << end.dump() << '\n';
  }
  return os.str();
}

Transcript Transcript::from_jsonl(const std::string& text) {
  Transcript t;
  std::istringstream is(text);
  std::string line;
  std::uint64_t digest = kFnvOffset;
  std::size_t count = 0;
  bool ended = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (ended) throw Error(ErrorCode::kIncompleteTranscript, "records after the trailer");
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kIncompleteTranscript, std::string("unparsable line: ") + e.what());
    }
    if (j.contains("end")) {
      if (j.at("records").get<std::size_t>() != count || j.at("digest").get<std::string>() != hex(digest)) {
        throw Error(ErrorCode::kIncompleteTranscript, "trailer does not match the records");
      }
      ended = true;
      continue;
    }
    const std::string claimed = j.at("digest").get<std::string>();
    j.erase("digest");
    if (j.at("seq").get<std::size_t>() != count) {
      throw Error(ErrorCode::kIncompleteTranscript, "record sequence gap at " + std::to_string(count));
    }
    digest = fnv1a(digest, j.dump());
    if (claimed != hex(digest)) {
      throw Error(ErrorCode::kIncompleteTranscript, "digest chain broken at record " + std::to_string(count));
    }
    t.records_.push_back(from_json(j));
    ++count;
  }
  if (!ended) throw Error(ErrorCode::kIncompleteTranscript, "transcript has no trailer");
  t.sealed_ = true;
  return t;
}

Network::Network(ChannelSpec spec, CostModel sizes) : spec_(spec), sizes_(sizes) {
  spec_.validate();
  sizes_.validate();
}

std::uint64_t Network::payload_bytes(const Message& m) const {
  switch (m.kind) {
    case MessageKind::kRlweCt: return m.cts.size() * sizes_.rlwe_ct_bytes();
    case MessageKind::kLweCtBatch: return m.lwes.size() * sizes_.lwe_ct_bytes();
    case MessageKind::kCleartext: return m.values.size() * sizeof(u64);
    case MessageKind::kControl: return 0;
  }
  return 0;
}

void Network::send(Message msg) {
  msg.payload_bytes = payload_bytes(msg);
  const std::uint64_t ct_count = msg.kind == MessageKind::kRlweCt      ? msg.cts.size()
                                 : msg.kind == MessageKind::kLweCtBatch ? msg.lwes.size()
                                                                        : 0;
  const double seconds = spec_.transfer_seconds(msg.payload_bytes);
  OpCounter ops;
  try {
    ops = innermost_measurement().ops;
  } catch (const Error&) {
  }
  TranscriptRecord rec;
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (closed_) throw Error(ErrorCode::kChannelClosed, msg.sender + "->" + msg.receiver + " is closed");
    Channel& ch = channels_[{msg.sender, msg.receiver}];
    msg.logical_time_sent = clocks_[msg.sender];
    msg.logical_time_arrived = msg.logical_time_sent + seconds;
    rec = TranscriptRecord{msg.sender, msg.receiver, msg.kind, msg.label, msg.payload_bytes, ct_count,
                           msg.logical_time_sent, msg.logical_time_arrived, ch.next_seq++, ops};
    ch.queue.push_back(std::move(msg));
  }
  cv_.notify_all();
  transcript_.append(rec);
  metering::record_message(rec.sender, rec.receiver, rec.kind, rec.bytes, rec.ct_count, seconds);
}

Message Network::recv(const std::string& receiver, const std::string& sender) {
  std::unique_lock<std::mutex> lock(mu_);
  Channel& ch = channels_[{sender, receiver}];
  cv_.wait(lock, [&] { return !ch.queue.empty() || closed_; });
  if (ch.queue.empty()) throw Error(ErrorCode::kChannelClosed, sender + "->" + receiver + " is closed");
  Message m = std::move(ch.queue.front());
  ch.queue.pop_front();
  double& clk = clocks_[receiver];
  clk = std::max(clk, m.logical_time_arrived);
  return m;
}

void Network::close() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool Network::closed() const {
  std::lock_guard<std::mutex> lock(mu_);
  return closed_;
}

double Network::clock(const std::string& party) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = clocks_.find(party);
  return it == clocks_.end() ? 0.0 : it->second;
}

AuditReport audit(const Transcript& transcript, const matmult::ComplexityPrediction& expectation,
                  const std::string& matrix_owner, const std::string& vector_owner) {
  if (!transcript.sealed()) throw Error(ErrorCode::kIncompleteTranscript, "transcript is not sealed");
  std::uint64_t in_rlwe = 0, in_lwe = 0, out_rlwe = 0, out_lwe = 0;
  for (const auto& r : transcript.records()) {
    const bool in = r.sender == vector_owner && r.receiver == matrix_owner;
    const bool out = r.sender == matrix_owner && r.receiver == vector_owner;
    if (r.kind == MessageKind::kRlweCt) {
      if (in) in_rlwe += r.ct_count;
      if (out) out_rlwe += r.ct_count;
    } else if (r.kind == MessageKind::kLweCtBatch) {
      if (in) in_lwe += r.ct_count;
      if (out) out_lwe += r.ct_count;
    }
  }
  const bool lwe_out = expectation.result_kind == matmult::CtKind::kLwe;
  const std::uint64_t want_out_rlwe = lwe_out ? 0 : expectation.ct_a_to_b;
  const std::uint64_t want_out_lwe = lwe_out ? expectation.ct_a_to_b : 0;
  AuditReport rep;
  auto check = [&](const char* what, std::uint64_t got, std::uint64_t want) {
    if (got != want) {
      rep.pass = false;
      rep.mismatches.push_back(std::string(what) + ": expected " + std::to_string(want) + ", got " +
                               std::to_string(got));
    }
  };
  check((vector_owner + "->" + matrix_owner + " rlwe_ct").c_str(), in_rlwe, expectation.ct_b_to_a);
  check((vector_owner + "->" + matrix_owner + " lwe_ct").c_str(), in_lwe, 0);
  check((matrix_owner + "->" + vector_owner + " rlwe_ct").c_str(), out_rlwe, want_out_rlwe);
  check((matrix_owner + "->" + vector_owner + " lwe_ct").c_str(), out_lwe, want_out_lwe);
  return rep;
}

}  // namespace hevfl::netsim
