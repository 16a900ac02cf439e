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


#ifndef SE2FA_CAPTURE_H_
#define SE2FA_CAPTURE_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "se2fa/cookie.h"
#include "se2fa/flow.h"

namespace se2fa {

// One cookie-bearing header seen on the wire. The capture log is JSONL,
// one record per line, shared with the browser extension.
enum class CaptureDirection { kRequest, kResponse };

struct CaptureRecord {
  CaptureDirection direction = CaptureDirection::kRequest;
  std::string url;
  std::string header_name;  // "Cookie" or "Set-Cookie"
  std::string header_value;
  Timestamp at{};

  friend bool operator==(const CaptureRecord&, const CaptureRecord&) = default;
};

// Requests carry Cookie and responses carry Set-Cookie; anything else is
// Error(kFormatError) with the record index.
Json capture_to_json(const CaptureRecord& r);
CaptureRecord capture_from_json(const Json& j, std::size_t index = 0);

std::string serialize_capture_log(std::span<const CaptureRecord> records);
// Blank lines are skipped. Errors carry the zero-based line number.
std::vector<CaptureRecord> parse_capture_log(std::string_view jsonl);

// Keeps the Cookie (request) or Set-Cookie (response) headers out of an
// arbitrary header list, matching names case-insensitively.
std::vector<CaptureRecord> capture_headers(CaptureDirection direction, const std::string& url,
                                           const std::vector<std::pair<std::string, std::string>>& headers,
                                           Timestamp at);

// The driver's trace in capture form: each exchange yields its Cookie
// header (when one was sent) followed by its Set-Cookie headers.
std::vector<CaptureRecord> capture_from_trace(std::span<const HttpExchange> trace);

}  // namespace se2fa

#endif  // SE2FA_CAPTURE_H_
