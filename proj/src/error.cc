//
// Copyright 2026 The se2fa Authors.
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
//

#include "se2fa/error.h"

namespace se2fa {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedCookie: return "MalformedCookie";
    case ErrorCode::kForeignDomain: return "ForeignDomain";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kUnknownKey: return "UnknownKey";
    case ErrorCode::kTargetUnreachable: return "TargetUnreachable";
    case ErrorCode::kAuthFailed: return "AuthFailed";
    case ErrorCode::kChallengeFailed: return "ChallengeFailed";
    case ErrorCode::kScriptInvalid: return "ScriptInvalid";
    case ErrorCode::kAssertionFailed: return "AssertionFailed";
    case ErrorCode::kAmbiguousPrompt: return "AmbiguousPrompt";
    case ErrorCode::kInconclusive: return "Inconclusive";
    case ErrorCode::kIsolationFailed: return "IsolationFailed";
    case ErrorCode::kEmptyAudit: return "EmptyAudit";
    case ErrorCode::kInsufficientSets: return "InsufficientSets";
    case ErrorCode::kUnforgeable: return "Unforgeable";
    case ErrorCode::kPortInUse: return "PortInUse";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kUnclassifiable: return "Unclassifiable";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> index)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code),
      index_(index) {}

}  // namespace se2fa
