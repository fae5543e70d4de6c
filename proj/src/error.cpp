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

#include "hevfl/error.hpp"

namespace hevfl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kVectorTooLong: return "VectorTooLong";
    case ErrorCode::kOverflowAtScale: return "OverflowAtScale";
    case ErrorCode::kScaleMismatch: return "ScaleMismatch";
    case ErrorCode::kSlotCountMismatch: return "SlotCountMismatch";
    case ErrorCode::kLevelExhausted: return "LevelExhausted";
    case ErrorCode::kOffsetOutOfRange: return "OffsetOutOfRange";
    case ErrorCode::kScopeNotOpen: return "ScopeNotOpen";
    case ErrorCode::kBadModulus: return "BadModulus";
    case ErrorCode::kModulusMismatch: return "ModulusMismatch";
    case ErrorCode::kMissingGaloisKey: return "MissingGaloisKey";
    case ErrorCode::kMatrixTooLarge: return "MatrixTooLarge";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kOperandTooLarge: return "OperandTooLarge";
    case ErrorCode::kPackingNotApplicable: return "PackingNotApplicable";
    case ErrorCode::kNotRequired: return "NotRequired";
    case ErrorCode::kEncodingMismatch: return "EncodingMismatch";
    case ErrorCode::kReplicationMismatch: return "ReplicationMismatch";
    case ErrorCode::kPlanMismatch: return "PlanMismatch";
    case ErrorCode::kCapacityExceeded: return "CapacityExceeded";
    case ErrorCode::kLayoutUnsupported: return "LayoutUnsupported";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kMissingConvertedTranspose: return "MissingConvertedTranspose";
    case ErrorCode::kChannelClosed: return "ChannelClosed";
    case ErrorCode::kIncompleteTranscript: return "IncompleteTranscript";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kDatasetMissing: return "DatasetMissing";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kBackendMismatch: return "BackendMismatch";
  }
  return "Unknown";
}

}  // namespace hevfl
