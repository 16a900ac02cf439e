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

"""Writes the labeled synthetic search corpus used by the spider tests.

Labels come from construction: a positive domain gets at least one result
that names the domain and a 2FA term; a negative domain only gets results
that either skip the terms or talk about a lookalike host.

Outputs docs.jsonl, domains.txt and labels.json next to this script.
"""

import json
import pathlib
import random

HERE = pathlib.Path(__file__).resolve().parent
ENGINES = ["google", "bing", "yandex", "yahoo"]

WORDS = ["shop", "news", "cloud", "forum", "bank", "travel", "games", "mail", "photo",
         "video", "learn", "health", "jobs", "music", "recipes", "sports", "weather",
         "stream", "market", "social", "maps", "books", "crypto", "energy"]
TLDS = ["com", "net", "org", "io"]

POSITIVE_TITLES = [
    "How to enable 2FA on {d}",
    "{d} two-factor authentication setup guide",
    "Turn on multi-factor sign-in for your {d} account",
    "Securing {d} with two-step verification",
    "{d} adds MFA support for all users",
    "Set up two factor login at {d}",
]
POSITIVE_SNIPPETS = [
    "Open security settings on {d} and scan the QR code with an authenticator app.",
    "Users of {d} can now require a verification code at every sign-in.",
    "The help center at {d} explains backup codes and trusted devices.",
    "",
]
NEUTRAL_TITLES = [
    "{d} - official site",
    "{d} reviews and ratings",
    "Is {d} down? Current status",
    "{d} pricing and plans",
    "Contact {d} customer support",
]
NEUTRAL_SNIPPETS = [
    "Find opening hours, prices and the latest announcements from {d}.",
    "Compare {d} with similar services before you sign up.",
    "Read what customers say about shipping and returns at {d}.",
]
# Results that carry the terms but name a different host.
DECOY_TITLES = [
    "How to enable 2FA on not{d}",
    "{d}.evil.example two-factor phishing warning",
    "Generic MFA guide for small websites",
    "Two-step verification explained",
]


def domain_names(rng, n):
    names = set()
    while len(names) < n:
        names.add(f"{rng.choice(WORDS)}{rng.choice(WORDS)}{rng.randint(1, 99)}.{rng.choice(TLDS)}")
    return sorted(names)


def doc(rng, domain, title, snippet, url_host):
    path = rng.choice(["/", "/help/security", "/blog/news", "/about"])
    return {"domain": domain, "sourceEngine": rng.choice(ENGINES), "title": title,
            "snippet": snippet, "url": f"https://{url_host}{path}"}


def main():
    rng = random.Random(20240610)
    domains = domain_names(rng, 48)
    positives = set(rng.sample(domains, 24))
    docs = []
    for d in domains:
        n = rng.randint(4, 6)
        items = []
        if d in positives:
            items.append(doc(rng, d, rng.choice(POSITIVE_TITLES).format(d=d),
                             rng.choice(POSITIVE_SNIPPETS).format(d=d), d))
            n -= 1
        for _ in range(n):
            kind = rng.random()
            if kind < 0.5:
                items.append(doc(rng, d, rng.choice(NEUTRAL_TITLES).format(d=d),
                                 rng.choice(NEUTRAL_SNIPPETS).format(d=d), d))
            else:
                host = rng.choice(["howto.example", "blog.example", "security.example"])
                items.append(doc(rng, d, rng.choice(DECOY_TITLES).format(d=d),
                                 "Step by step instructions with screenshots.", host))
        rng.shuffle(items)
        docs.extend(items)

    with open(HERE / "docs.jsonl", "w", encoding="utf-8") as f:
        for item in docs:
            f.write(json.dumps(item, ensure_ascii=False) + "\n")
    (HERE / "domains.txt").write_text("".join(d + "\n" for d in domains), encoding="utf-8")
    labels = {"positive": sorted(positives), "negative": sorted(set(domains) - positives)}
    (HERE / "labels.json").write_text(json.dumps(labels, indent=2) + "\n", encoding="utf-8")
    print(f"{len(docs)} docs, {len(domains)} domains, {len(positives)} positive")


if __name__ == "__main__":
    main()
