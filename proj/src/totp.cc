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

#include "se2fa/totp.h"

#include <array>

#include "se2fa/encoding.h"
#include "se2fa/error.h"

namespace se2fa {

std::uint64_t totp_counter(Timestamp t, std::chrono::seconds step) {
  auto secs = t.time_since_epoch().count();
  if (secs < 0) return 0;
  return static_cast<std::uint64_t>(secs) / static_cast<std::uint64_t>(step.count());
}

std::string hotp_code(std::span<const std::uint8_t> seed, std::uint64_t counter, int digits) {
  std::array<std::uint8_t, 8> msg{};
  for (int i = 7; i >= 0; --i) {
    msg[i] = static_cast<std::uint8_t>(counter & 0xFF);
    counter >>= 8;
  }
  Bytes mac = hmac_sha1(seed, msg);
  int offset = mac.back() & 0x0F;
  std::uint32_t bin = ((mac[offset] & 0x7F) << 24) | (mac[offset + 1] << 16) |
                      (mac[offset + 2] << 8) | mac[offset + 3];
  std::uint32_t mod = 1;
  for (int i = 0; i < digits; ++i) mod *= 10;
  std::string code = std::to_string(bin % mod);
  return std::string(static_cast<std::size_t>(digits) - code.size(), '0') + code;
}

std::string totp_code(std::span<const std::uint8_t> seed, Timestamp t, std::chrono::seconds step,
                      int digits) {
  if (digits != 6 && digits != 8) {
    throw Error(ErrorCode::kInvalidArgument, "digits must be 6 or 8");
  }
  if (step.count() <= 0) throw Error(ErrorCode::kInvalidArgument, "step must be positive");
  return hotp_code(seed, totp_counter(t, step), digits);
}

}  // namespace se2fa
