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

#include "hevfl/simd/metering.hpp"

#include <algorithm>
#include <vector>

#include "hevfl/error.hpp"

namespace hevfl {

namespace {

thread_local std::vector<Measurement*> open_scopes;

void detach(Measurement* target) {
  auto it = std::find(open_scopes.begin(), open_scopes.end(), target);
  if (it != open_scopes.end()) open_scopes.erase(it);
}

}  // namespace

std::string to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::kRlweCt: return "rlwe_ct";
    case MessageKind::kLweCtBatch: return "lwe_ct_batch";
    case MessageKind::kCleartext: return "cleartext";
    case MessageKind::kControl: return "control";
  }
  return "unknown";
}

DirectionStats CommStats::direction(const std::string& sender, const std::string& receiver) const {
  auto it = directions.find(key(sender, receiver));
  return it == directions.end() ? DirectionStats{} : it->second;
}

std::uint64_t CommStats::total_bytes() const {
  std::uint64_t total = 0;
  for (const auto& [k, d] : directions) total += d.bytes;
  return total;
}

CommStats& CommStats::operator+=(const CommStats& o) {
  for (const auto& [k, d] : o.directions) directions[k] += d;
  modeled_seconds += o.modeled_seconds;
  return *this;
}

MeasureScope::MeasureScope() : open_(true), valid_(true) { open_scopes.push_back(&data_); }

MeasureScope::~MeasureScope() { close(); }

MeasureScope::MeasureScope(MeasureScope&& other) noexcept
    : data_(std::move(other.data_)), open_(other.open_), valid_(other.valid_) {
  if (open_) {
    auto it = std::find(open_scopes.begin(), open_scopes.end(), &other.data_);
    if (it != open_scopes.end()) *it = &data_;
  }
  other.open_ = false;
  other.valid_ = false;
}

void MeasureScope::close() {
  if (open_) detach(&data_);
  open_ = false;
}

Measurement MeasureScope::measure() const {
  if (!valid_) throw Error(ErrorCode::kScopeNotOpen, "measurement scope was never opened");
  return data_;
}

Measurement innermost_measurement() {
  if (open_scopes.empty()) throw Error(ErrorCode::kScopeNotOpen, "no measurement scope is open");
  return *open_scopes.back();
}

namespace metering {

void record_ops(const OpCounter& delta) {
  for (Measurement* m : open_scopes) m->ops += delta;
}

void record_message(const std::string& sender, const std::string& receiver, MessageKind kind,
                    std::uint64_t bytes, std::uint64_t ct_count, double seconds) {
  DirectionStats d;
  d.bytes = bytes;
  d.messages = 1;
  if (kind == MessageKind::kRlweCt) d.rlwe_cts = ct_count;
  if (kind == MessageKind::kLweCtBatch) d.lwe_cts = ct_count;
  for (Measurement* m : open_scopes) {
    m->comm.directions[CommStats::key(sender, receiver)] += d;
    m->comm.modeled_seconds += seconds;
  }
}

}  // namespace metering

}  // namespace hevfl
