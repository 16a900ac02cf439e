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

#ifndef SE2FA_TOTP_H_
#define SE2FA_TOTP_H_

#include <chrono>
#include <cstdint>
#include <span>
#include <string>

#include "se2fa/clock.h"

namespace se2fa {

// Time-step counter: floor(t / step) with T0 = 0.
std::uint64_t totp_counter(Timestamp t, std::chrono::seconds step);

// HOTP with dynamic truncation over HMAC-SHA1, zero-padded to `digits`.
std::string hotp_code(std::span<const std::uint8_t> seed, std::uint64_t counter, int digits);

// RFC 6238 time-based code. `digits` must be 6 or 8 and `step` positive;
// anything else throws Error(kInvalidArgument).
std::string totp_code(std::span<const std::uint8_t> seed, Timestamp t,
                      std::chrono::seconds step = std::chrono::seconds{30}, int digits = 6);

}  // namespace se2fa

#endif  // SE2FA_TOTP_H_
