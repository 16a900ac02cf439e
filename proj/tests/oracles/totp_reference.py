#!/usr/bin/env python3
#
# Copyright 2026 The se2fa Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#


# Independent TOTP reference (Python hmac) used to freeze the vectors in
# tests/totp_test.cc. Run: python3 tests/oracles/totp_reference.py
import hashlib
import hmac
import struct

SEED = b"12345678901234567890"


def totp(seed, t, step=30, digits=8):
    counter = struct.pack(">Q", t // step)
    mac = hmac.new(seed, counter, hashlib.sha1).digest()
    off = mac[-1] & 0x0F
    code = struct.unpack(">I", mac[off:off + 4])[0] & 0x7FFFFFFF
    return str(code % (10 ** digits)).zfill(digits)


if __name__ == "__main__":
    for t in (59, 1111111109, 1111111111, 1234567890, 2000000000, 20000000000):
        print(t, totp(SEED, t), totp(SEED, t, digits=6))
    print("60", totp(SEED, 60))
