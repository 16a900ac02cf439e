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

#ifndef SE2FA_ENCODING_H_
#define SE2FA_ENCODING_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace se2fa {

using Bytes = std::vector<std::uint8_t>;

Bytes to_bytes(std::string_view s);
std::string to_string(std::span<const std::uint8_t> b);

std::string hex_encode(std::span<const std::uint8_t> data);

std::string base64_encode(std::span<const std::uint8_t> data);
// Accepts the standard and URL-safe alphabets, with or without padding.
std::optional<Bytes> base64_decode(std::string_view text);

// RFC 4648 base32, the usual encoding for authenticator seeds. Case and
// padding insensitive; spaces are ignored.
std::optional<Bytes> base32_decode(std::string_view text);
std::string base32_encode(std::span<const std::uint8_t> data);

Bytes hmac_sha1(std::span<const std::uint8_t> key, std::span<const std::uint8_t> message);
Bytes hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> message);
std::string sha256_hex(std::string_view data);

// Cryptographically random bytes.
Bytes random_bytes(std::size_t n);
std::string random_hex(std::size_t n_bytes);

}  // namespace se2fa

#endif  // SE2FA_ENCODING_H_
