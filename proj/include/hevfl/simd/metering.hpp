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
#include <string>

namespace hevfl {

// Logical O1-O4 invocation counts.
struct OpCounter {
  std::uint64_t add = 0;
  std::uint64_t mult = 0;
  std::uint64_t rot = 0;
  std::uint64_t hst_rot = 0;

  OpCounter& operator+=(const OpCounter& o) {
    add += o.add;
    mult += o.mult;
    rot += o.rot;
    hst_rot += o.hst_rot;
    return *this;
  }
  friend OpCounter operator+(OpCounter a, const OpCounter& b) { return a += b; }
  friend bool operator==(const OpCounter&, const OpCounter&) = default;
};

enum class MessageKind { kRlweCt, kLweCtBatch, kCleartext, kControl };

std::string to_string(MessageKind kind);

struct DirectionStats {
  std::uint64_t bytes = 0;
  std::uint64_t messages = 0;
  std::uint64_t rlwe_cts = 0;
  std::uint64_t lwe_cts = 0;

  DirectionStats& operator+=(const DirectionStats& o) {
    bytes += o.bytes;
    messages += o.messages;
    rlwe_cts += o.rlwe_cts;
    lwe_cts += o.lwe_cts;
    return *this;
  }
  friend bool operator==(const DirectionStats&, const DirectionStats&) = default;
};

// Traffic per direction, keyed "sender->receiver".
struct CommStats {
  std::map<std::string, DirectionStats> directions;
  double modeled_seconds = 0.0;

  static std::string key(const std::string& sender, const std::string& receiver) {
    return sender + "->" + receiver;
  }
  DirectionStats direction(const std::string& sender, const std::string& receiver) const;
  std::uint64_t total_bytes() const;

  CommStats& operator+=(const CommStats& o);
  friend bool operator==(const CommStats&, const CommStats&) = default;
};

struct Measurement {
  OpCounter ops;
  CommStats comm;
};

// Accumulates every operation and message recorded on the opening thread
// while it is open. Scopes nest: an operation counts toward every open scope.
class MeasureScope {
 public:
  MeasureScope();
  ~MeasureScope();
  MeasureScope(const MeasureScope&) = delete;
  MeasureScope& operator=(const MeasureScope&) = delete;
  MeasureScope(MeasureScope&& other) noexcept;
  MeasureScope& operator=(MeasureScope&&) = delete;

  // Stops accumulating; the collected counts stay readable.
  void close();
  bool is_open() const { return open_; }

  // Throws ScopeNotOpen for a moved-from scope.
  Measurement measure() const;

 private:
  Measurement data_;
  bool open_ = false;
  bool valid_ = false;
};

// Counts recorded into the innermost open scope; throws ScopeNotOpen when none is open.
Measurement innermost_measurement();

namespace metering {

void record_ops(const OpCounter& delta);
void record_message(const std::string& sender, const std::string& receiver, MessageKind kind,
                    std::uint64_t bytes, std::uint64_t ct_count, double seconds);

}  // namespace metering

}  // namespace hevfl
