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


# Regenerates matrix.json (24 mock 2FA services) and the two test accounts.
#
#   python3 fixtures/testbed/build_matrix.py
import base64
import hashlib
import json
import os

HERE = os.path.dirname(os.path.abspath(__file__))

ACCOUNTS = [
    # username, password, raw seed (20 bytes)
    ("victim", "victim-pass-8fj2", b"victim-seed-0123456!"),
    ("attacker", "attacker-pass-3kq9", b"attacker-seed-98765!"),
]

DAY = 86400


def seed32(raw):
    return base64.b32encode(raw).decode().rstrip("=")


def accounts():
    return [{"username": u, "passwordHash": "sha256:" + hashlib.sha256(p.encode()).hexdigest(),
             "totpSeed": seed32(s)} for u, p, s in ACCOUNTS]


def controls(cookie=False, fp=False, ip=False, token=False):
    return {"cookieBased": cookie, "fingerprintBased": fp, "ipBased": ip,
            "deviceTokenBased": token}


def trust(name, scheme="Random128", secure=True, http_only=True, days=30):
    return {"name": name, "valueScheme": scheme, "secure": secure, "httpOnly": http_only,
            "maxAgeSeconds": None if days is None else days * DAY}


def target(id, rc, cookies=(), placement="AtChallenge", decoys=2, broken=False, note=None):
    return {"id": id, "riskControls": rc, "rememberPlacement": placement,
            "trustCookies": list(cookies), "decoyCookies": decoys, "broken2fa": broken,
            "notification": note, "accounts": accounts()}


CO = controls(cookie=True)

TARGETS = [
    target("co-rand-sh", CO, [trust("remember_token")], note="N1"),
    target("co-rand-s", CO, [trust("device_trust", http_only=False, days=365)], note="N2"),
    target("co-rand-h", CO, [trust("tfa_ok", secure=False, days=7)], decoys=1),
    target("co-rand-bare", CO, [trust("rd", secure=False, http_only=False, days=400)], note="N3"),
    target("co-rand-pair", CO, [trust("mfa_dev"), trust("mfa_sig")], decoys=3),
    target("co-fixed", CO, [trust("trusted", "FixedPerAccount")], note="N1"),
    target("co-global", CO, [trust("skip2fa", "GlobalShared")]),
    target("co-ts-sec", CO, [trust("otp_verified_at", "TimestampSeconds", http_only=False)],
           note="N2"),
    target("co-ts-ms", CO, [trust("verified_ms", "TimestampMillis", days=90)]),
    target("co-b64", CO, [trust("profile", "Base64Profile", secure=False)], note="N3"),
    target("broken-a", controls(), [], decoys=1, broken=True),
    target("broken-b", controls(), [], decoys=0, broken=True, note="N1"),
    target("ck-fp-sh", controls(cookie=True, fp=True), [trust("dt")], note="N1"),
    target("ck-fp-bare", controls(cookie=True, fp=True),
           [trust("dt", secure=False, http_only=False)]),
    target("ck-ip-sh", controls(cookie=True, ip=True), [trust("known_ip_dev")], note="N3"),
    target("ck-ip-s", controls(cookie=True, ip=True), [trust("known_ip_dev", http_only=False)]),
    target("ls-token", controls(token=True), [], note="N2"),
    target("rm-sh", CO, [trust("remember_me")], placement="RememberMe"),
    target("rm-bare", CO, [trust("remember_me", secure=False, http_only=False, days=365)],
           placement="RememberMe", note="N1"),
    target("fp-only", controls(fp=True), []),
    target("no-remember", CO, [trust("unused")], placement="None", note="N4"),
    target("in-settings", CO, [trust("trusted_device")], placement="InSettings", note="N5"),
    target("co-session", CO, [trust("tfa_session", days=None)], note="N6"),
    target("co-mixed", CO, [trust("tk_a"), trust("tk_b", secure=False, http_only=False)],
           decoys=4),
]


def main():
    assert len(TARGETS) == 24
    with open(os.path.join(HERE, "matrix.json"), "w") as f:
        json.dump({"targets": TARGETS}, f, indent=1)
        f.write("\n")
    for (u, p, s) in ACCOUNTS:
        with open(os.path.join(HERE, u + ".json"), "w") as f:
            json.dump({"username": u, "password": p, "totpSeed": seed32(s)}, f, indent=1)
            f.write("\n")


if __name__ == "__main__":
    main()
