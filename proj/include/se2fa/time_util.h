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

#ifndef SE2FA_TIME_UTIL_H_
#define SE2FA_TIME_UTIL_H_

#include <optional>
#include <string>
#include <string_view>

#include "se2fa/clock.h"

namespace se2fa {

// Largest timestamp the interchange format can carry (9999-12-31T23:59:59Z).
Timestamp max_timestamp();
Timestamp min_timestamp();

// "2024-06-10T08:30:00Z". Always UTC, second resolution.
std::string format_rfc3339(Timestamp t);

// Accepts "Z" or "+hh:mm"/"-hh:mm" offsets and fractional seconds
// (truncated). Returns nullopt on any syntax or range error.
std::optional<Timestamp> parse_rfc3339(std::string_view text);

// "Thu, 01 Jan 1970 00:00:00 GMT"
std::string format_http_date(Timestamp t);

// The cookie-date algorithm of RFC 6265 section 5.1.1.
std::optional<Timestamp> parse_cookie_date(std::string_view text);

// "2024-06-10"
std::string format_iso_date(Timestamp t);

}  // namespace se2fa

#endif  // SE2FA_TIME_UTIL_H_
