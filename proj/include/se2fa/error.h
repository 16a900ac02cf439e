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

#ifndef SE2FA_ERROR_H_
#define SE2FA_ERROR_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace se2fa {

enum class ErrorCode {
  kMalformedCookie,
  kForeignDomain,
  kFormatError,
  kUnknownKey,
  kTargetUnreachable,
  kAuthFailed,
  kChallengeFailed,
  kScriptInvalid,
  kAssertionFailed,
  kAmbiguousPrompt,
  kInconclusive,
  kIsolationFailed,
  kEmptyAudit,
  kInsufficientSets,
  kUnforgeable,
  kPortInUse,
  kInvalidConfig,
  kUnclassifiable,
  kUnsupportedFormat,
  kInvalidArgument,
};

std::string_view error_code_name(ErrorCode code);

// All library failures are reported as se2fa::Error. `index` carries the
// offending record index (FormatError) or flow step (AuthFailed,
// ChallengeFailed, ...) when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> index = std::nullopt);

  ErrorCode code() const { return code_; }
  std::optional<std::size_t> index() const { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
};

}  // namespace se2fa

#endif  // SE2FA_ERROR_H_
