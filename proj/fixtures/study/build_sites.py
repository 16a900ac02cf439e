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


# Regenerates sites.json, directory.txt and spider_verdicts.json from the
# transcribed tables (audited_sites.json, methods.json, notifications.json).
#
#   python3 fixtures/study/build_sites.py
#
# Output is deterministic. See README.md for which fields are transcribed
# and which are synthetic placements.
import json
import os

HERE = os.path.dirname(os.path.abspath(__file__))

GROUP_SIZES = [("G1", 227), ("G2CookieOnly", 93), ("G2Other", 87),
               ("G3", 62), ("G4", 430), ("G5", 11)]


def load(name):
    with open(os.path.join(HERE, name)) as f:
        return json.load(f)


def row_verdict(row, notification):
    flaws = []
    per_cookie = []
    uses_local_storage = row["marker"] == "local-storage"
    if row["marker"] == "cross-account-reuse":
        flaws.append({"kind": "CrossAccountReuse", "evidence": "table marker"})
    elif row["marker"] == "predictable-value":
        flaws.append({"kind": "PredictableTimestamp", "evidence": "table marker"})
    elif row["marker"] == "broken-2fa":
        flaws.append({"kind": "Broken2FA", "evidence": "table marker"})
    if row["marker"] not in ("local-storage", "broken-2fa"):
        for i in range(row["amount"]):
            per_cookie.append({
                "name": "c%d" % (i + 1),
                "domain": "",
                "path": "/",
                "secure": row["secure"],
                "httpOnly": row["httpOnly"],
                "lifetimeDays": None if row["sessionCookie"] else row["expiryDays"],
            })
    broken = row["marker"] == "broken-2fa"
    return {
        "rememberDevice": not broken,
        "measures": {
            "cookieBased": not broken and not uses_local_storage,
            "fingerprintBased": False,
            "ipBased": False,
            "deviceTokenBased": uses_local_storage,
        },
        "trust": {"keys": [{"name": c["name"], "domain": "", "path": "/"} for c in per_cookie],
                  "records": []},
        "audit": {
            "cookieOnly": not broken and not uses_local_storage,
            "usesLocalStorage": uses_local_storage,
            "perCookie": per_cookie,
            "flaws": flaws,
            "warnings": [],
        },
        "attacks": row["attackType"],
        "notification": notification,
        "notes": [],
    }


def method_sets(method_counts):
    """Assigns method sets to 910 sites so every transcribed method count is exact.

    For the k-method column, method m appears in c_m sites out of n_k. The
    c_m copies are laid out method by method and site i takes slots
    i, i + n_k, i + 2 n_k, ... which gives distinct methods as long as
    every c_m <= n_k.
    """
    out = []
    for k in range(1, 6):
        slots = []
        for m in method_counts["methods"]:
            slots += [m["method"]] * m["byCount"][k - 1]
        n = len(slots) // k
        assert n * k == len(slots)
        for i in range(n):
            s = [slots[i + j * n] for j in range(k)]
            assert len(set(s)) == k
            out.append(sorted(s))
    return out


def synthetic_ranks(count, top_thousand):
    # top_thousand sites inside rank 1..1000, the rest thinning out to 10,000.
    ranks = [1 + (i * 997) // top_thousand for i in range(top_thousand)]
    rest = count - top_thousand
    for i in range(rest):
        frac = (i + 1) / rest
        ranks.append(1000 + int(9000 * frac ** 1.15))
    used = set()
    out = []
    for r in ranks:
        while r in used:
            r += 1
        used.add(r)
        out.append(r)
    return out


def main():
    rows = load("audited_sites.json")["rows"]
    method_counts = load("methods.json")
    notification_counts = load("notifications.json")

    notif = []
    for n in notification_counts["notifications"]:
        notif += [n["type"]] * n["number"]

    cookie_rows = [r for r in rows if r["marker"] != "broken-2fa"]
    broken_rows = [r for r in rows if r["marker"] == "broken-2fa"]
    assert len(cookie_rows) == 93 and len(broken_rows) == 2

    sites = []
    for g, size in GROUP_SIZES:
        if g == "G2CookieOnly":
            for i, r in enumerate(cookie_rows):
                sites.append((g, r["website"], r, notif[i] if i < len(notif) else None))
            continue
        extra = broken_rows if g == "G1" else []
        for r in extra:
            sites.append((g, r["website"], r, None))
        for i in range(size - len(extra)):
            sites.append((g, "Anonymized %s - %d" % (g, i + 1), None, None))
    assert len(sites) == 910
    assert len({s[1] for s in sites}) == 910

    methods = method_sets(method_counts)
    # The top500 tier covers ranks 1 to 500, top10k the rest up to 10,000.
    def tier_of(i):
        return sites[i][2]["tier"] if sites[i][2] is not None else None
    ordered = sorted(range(910), key=lambda i: (
        {"top500": 0, None: 1, "top10k": 2}[tier_of(i)], i))
    ranks = synthetic_ranks(910, 280)
    rank_of = {idx: ranks[pos] for pos, idx in enumerate(ordered)}

    records = []
    for i, (g, name, row, n) in enumerate(sites):
        rec = {
            "domain": name,
            "rank": rank_of[i],
            "registrable": g != "G4",
            "requiresThirdParty": g == "G3",
            "supports2fa": True,
            "canEnable2fa": g != "G5",
            "hasRememberDevice": g in ("G2CookieOnly", "G2Other"),
            "cookieOnly": True if g == "G2CookieOnly" else (False if g == "G2Other" else None),
            "methods": methods[i],
            "verdict": row_verdict(row, n) if row is not None else None,
        }
        if row is not None:
            rec["rowNo"] = row["no"]
        records.append(rec)

    with open(os.path.join(HERE, "sites.json"), "w") as f:
        json.dump({"sites": records}, f, indent=1)
        f.write("\n")

    # Directory comparison: 533 directory domains, 798 spider positives, 421 shared.
    names = [s[1] for s in sites]
    shared = names[:421]
    only_dir = names[421:533]
    only_spider = names[533:910]
    with open(os.path.join(HERE, "directory.txt"), "w") as f:
        for d in shared + only_dir:
            f.write(d + "\n")
    verdicts = [{"domain": d, "score": 3, "supports2fa": True, "matchedTerms": ["2fa"]}
                for d in shared + only_spider]
    # 1,371 candidates before review: 573 rejected.
    verdicts += [{"domain": "Rejected candidate - %d" % (i + 1), "score": 1,
                  "supports2fa": False, "matchedTerms": []} for i in range(573)]
    with open(os.path.join(HERE, "spider_verdicts.json"), "w") as f:
        json.dump({"verdicts": verdicts}, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
