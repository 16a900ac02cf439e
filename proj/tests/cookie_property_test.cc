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

#include <map>
#include <random>

#include <gtest/gtest.h>

#include "oracles/cookie_gen.h"
#include "se2fa/cookie.h"
#include "se2fa/error.h"
#include "se2fa/time_util.h"

namespace se2fa {
namespace {

using oracle::Gen;
using std::chrono::seconds;

TEST(CookieProperty, SerializationRoundTrip) {
  Gen g(1);
  for (int i = 0; i < 1000; ++i) {
    CookieSnapshot s(g.token(0, 8), g.when(), g.unique_records(g.uniform(0, 100)));
    ASSERT_EQ(parse_snapshot(serialize_snapshot(s)), s) << "case " << i;
  }
}

TEST(CookieProperty, HundredRecordRoundTrip) {
  Gen g(7);
  CookieSnapshot s("hundred", g.when(), g.unique_records(100));
  EXPECT_EQ(parse_snapshot(serialize_snapshot(s)), s);
}

// Oracle: a plain key -> record map classification, independent of
// diff_snapshots, plus replay via apply_diff.
TEST(CookieProperty, DiffSoundness) {
  Gen g(2);
  for (int i = 0; i < 1000; ++i) {
    auto pool = g.unique_records(g.uniform(0, 40));
    std::vector<CookieRecord> b, a;
    for (const auto& r : pool) {
      int fate = g.uniform(0, 4);
      if (fate == 0) {
        b.push_back(r);
      } else if (fate == 1) {
        a.push_back(r);
      } else if (fate == 2) {
        b.push_back(r);
        a.push_back(r);
      } else {
        b.push_back(r);
        auto m = r;
        if (g.coin()) m.value += "x";
        else m.http_only = !m.http_only;
        a.push_back(m);
      }
    }
    CookieSnapshot before("b", g.when(), b), after("a", g.when(), a);
    auto d = diff_snapshots(before, after);
    ASSERT_EQ(apply_diff(before, d, "a", after.taken_at()), after);

    std::map<CookieKey, CookieRecord> mb, ma;
    for (const auto& r : b) mb.emplace(r.key(), r);
    for (const auto& r : a) ma.emplace(r.key(), r);
    std::size_t added = 0, removed = 0, changed = 0;
    for (const auto& [k, r] : ma) {
      auto it = mb.find(k);
      if (it == mb.end()) ++added;
      else if (!(it->second == r)) ++changed;
    }
    for (const auto& [k, r] : mb) removed += ma.count(k) ? 0 : 1;
    ASSERT_EQ(d.added.size(), added);
    ASSERT_EQ(d.removed.size(), removed);
    ASSERT_EQ(d.changed.size(), changed);
  }
}

TEST(CookieProperty, MaxAgePrecedence) {
  Gen g(3);
  const Origin origin{"https", "example.test", "/"};
  for (int i = 0; i < 1000; ++i) {
    Timestamp now = g.when();
    int max_age = g.uniform(1, 400 * 86400);
    auto expires = format_http_date(g.when());
    std::string header = "n=v; ";
    if (g.coin()) header += "Expires=" + expires + "; Max-Age=" + std::to_string(max_age);
    else header += "Max-Age=" + std::to_string(max_age) + "; Expires=" + expires;
    auto r = parse_set_cookie(header, origin, now);
    ASSERT_EQ(r.expires_at, now + seconds{max_age}) << header;
  }
}

// Parsing arbitrary bytes either yields a record or a cookie-level error.
TEST(CookieProperty, ParseIsTotal) {
  Gen g(4);
  const Origin origin{"https", "example.test", "/p/q"};
  const std::string specials = "=;, \t\"\r\n\x00\x7f\xff.-/:";
  std::size_t parsed = 0;
  for (int i = 0; i < 100000; ++i) {
    std::string s(g.uniform(0, 64), '\0');
    for (auto& c : s) {
      c = g.coin() ? specials[g.uniform(0, specials.size() - 1)]
                   : static_cast<char>(g.uniform(0, 255));
    }
    if (g.coin()) s = "k=" + s;
    try {
      auto r = parse_set_cookie(s, origin, Timestamp{seconds{1718000000}});
      ASSERT_FALSE(r.name.empty());
      ++parsed;
    } catch (const Error& e) {
      ASSERT_TRUE(e.code() == ErrorCode::kMalformedCookie ||
                  e.code() == ErrorCode::kForeignDomain)
          << error_code_name(e.code());
    }
  }
  EXPECT_GT(parsed, 0u);
}

}  // namespace
}  // namespace se2fa
