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

#include <stdexcept>
#include <string>
#include <string_view>

namespace hevfl {

enum class ErrorCode {
  kVectorTooLong,
  kOverflowAtScale,
  kScaleMismatch,
  kSlotCountMismatch,
  kLevelExhausted,
  kOffsetOutOfRange,
  kScopeNotOpen,
  kBadModulus,
  kModulusMismatch,
  kMissingGaloisKey,
  kMatrixTooLarge,
  kIndexOutOfRange,
  kOperandTooLarge,
  kPackingNotApplicable,
  kNotRequired,
  kEncodingMismatch,
  kReplicationMismatch,
  kPlanMismatch,
  kCapacityExceeded,
  kLayoutUnsupported,
  kShapeMismatch,
  kMissingConvertedTranspose,
  kChannelClosed,
  kIncompleteTranscript,
  kConfigInvalid,
  kDatasetMissing,
  kIoFailure,
  kBackendMismatch,
};

std::string_view to_string(ErrorCode code);

// Every failure in the library is reported through this exception; the code
// lets callers and tests branch on the failure kind without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hevfl
