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

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "hevfl/matmult/types.hpp"
#include "hevfl/simd/backend.hpp"
#include "hevfl/simd/cost_model.hpp"
#include "hevfl/simd/metering.hpp"

namespace hevfl::netsim {

struct ChannelSpec {
  double bandwidth = 50e6;  // bytes per second
  double latency = 0.020;   // seconds, one way

  // Throws ConfigInvalid unless both are positive.
  void validate() const;
  double transfer_seconds(std::uint64_t bytes) const { return latency + static_cast<double>(bytes) / bandwidth; }
};

struct Message {
  std::string sender;
  std::string receiver;
  MessageKind kind = MessageKind::kControl;
  std::string label;
  std::vector<CiphertextHandle> cts;
  std::vector<LweHandle> lwes;
  std::vector<u64> values;  // cleartext payload
  // Filled in by the network.
  std::uint64_t payload_bytes = 0;
  double logical_time_sent = 0.0;
  double logical_time_arrived = 0.0;
};

struct TranscriptRecord {
  std::string sender;
  std::string receiver;
  MessageKind kind = MessageKind::kControl;
  std::string label;
  std::uint64_t bytes = 0;
  std::uint64_t ct_count = 0;
  double sent = 0.0;
  double arrived = 0.0;
  std::uint64_t channel_seq = 0;
  OpCounter sender_ops;  // sender's innermost scope at send time
  friend bool operator==(const TranscriptRecord&, const TranscriptRecord&) = default;
};

// Append-only message log. Records export in (sent, sender, receiver,
// channel_seq) order, so concurrent parties produce the same file every run.
// The export chains an FNV-1a digest through every line and ends with a
// trailer; a log without the trailer or with a broken chain is incomplete.
class Transcript {
 public:
  Transcript() = default;
  Transcript(const Transcript& other);
  Transcript& operator=(const Transcript& other);

  void append(TranscriptRecord r);
  void seal();
  bool sealed() const;
  std::vector<TranscriptRecord> records() const;
  CommStats stats(const ChannelSpec& spec) const;

  std::string to_jsonl() const;
  // Throws IncompleteTranscript on a missing trailer or a digest mismatch.
  static Transcript from_jsonl(const std::string& text);

 private:
  mutable std::mutex mu_;
  std::vector<TranscriptRecord> records_;
  bool sealed_ = false;
};

// Reliable FIFO channels between named parties with modeled transfer time.
// Each party keeps a logical clock: a send is stamped with the sender's
// clock, and a receive advances the receiver's clock to the arrival time.
class Network {
 public:
  Network(ChannelSpec spec, CostModel sizes);

  // Fills in bytes and times, appends to the transcript, records the message
  // in the sender's open measurement scopes. Throws ChannelClosed.
  void send(Message msg);
  // Blocks until a message from `sender` arrives. Throws ChannelClosed once
  // the network is closed and the channel is drained.
  Message recv(const std::string& receiver, const std::string& sender);

  // Wakes every blocked receiver; later sends fail.
  void close();
  bool closed() const;

  Transcript& transcript() { return transcript_; }
  const Transcript& transcript() const { return transcript_; }
  CommStats stats() const { return transcript_.stats(spec_); }
  double clock(const std::string& party) const;
  const ChannelSpec& spec() const { return spec_; }
  const CostModel& sizes() const { return sizes_; }
  std::uint64_t payload_bytes(const Message& m) const;

 private:
  struct Channel {
    std::deque<Message> queue;
    std::uint64_t next_seq = 0;
  };

  ChannelSpec spec_;
  CostModel sizes_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::pair<std::string, std::string>, Channel> channels_;
  std::map<std::string, double> clocks_;
  bool closed_ = false;
  Transcript transcript_;
};

struct AuditReport {
  bool pass = true;
  std::vector<std::string> mismatches;
};

// Compares ciphertext counts per direction with a prediction: `vector_owner`
// sends ct_b_to_a RLWE ciphertexts to `matrix_owner`, which returns ct_a_to_b
// ciphertexts of the predicted kind. Throws IncompleteTranscript unless sealed.
AuditReport audit(const Transcript& transcript, const matmult::ComplexityPrediction& expectation,
                  const std::string& matrix_owner = "A", const std::string& vector_owner = "B");

}  // namespace hevfl::netsim
