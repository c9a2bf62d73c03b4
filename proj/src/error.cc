// Copyright 2026 The synth-eval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "synth_eval/error.h"

namespace synth_eval {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kInternalGrammarFailure: return "InternalGrammarFailure";
    case ErrorCode::kParseErrorInput: return "ParseErrorInput";
    case ErrorCode::kOverlappingRewrites: return "OverlappingRewrites";
    case ErrorCode::kSpanOutOfBounds: return "SpanOutOfBounds";
    case ErrorCode::kStaleSite: return "StaleSite";
    case ErrorCode::kNoMutableSite: return "NoMutableSite";
    case ErrorCode::kMissingTests: return "MissingTests";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kZeroEmbedding: return "ZeroEmbedding";
    case ErrorCode::kEmptyMaskPlan: return "EmptyMaskPlan";
    case ErrorCode::kDivergence: return "Divergence";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kRuntimeUnavailable: return "RuntimeUnavailable";
    case ErrorCode::kSandboxFailure: return "SandboxFailure";
    case ErrorCode::kInvalidReference: return "InvalidReference";
    case ErrorCode::kBackendFailure: return "BackendFailure";
    case ErrorCode::kTransport: return "Transport";
    case ErrorCode::kProtocolMismatch: return "ProtocolMismatch";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
  }
  return "Unknown";
}

}  // namespace synth_eval
