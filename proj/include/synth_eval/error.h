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

#ifndef SYNTH_EVAL_ERROR_H_
#define SYNTH_EVAL_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace synth_eval {

enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kInternalGrammarFailure,
  kParseErrorInput,
  kOverlappingRewrites,
  kSpanOutOfBounds,
  kStaleSite,
  kNoMutableSite,
  kMissingTests,
  kEmptyInput,
  kZeroEmbedding,
  kEmptyMaskPlan,
  kDivergence,
  kLengthMismatch,
  kRuntimeUnavailable,
  kSandboxFailure,
  kInvalidReference,
  kBackendFailure,
  kTransport,
  kProtocolMismatch,
  kDimensionMismatch,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure surfaced by the library carries one of the codes above so the
// CLI can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace synth_eval

#endif  // SYNTH_EVAL_ERROR_H_
