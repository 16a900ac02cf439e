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

#include "se2fa/cookie.h"

#include <gtest/gtest.h>

#include "se2fa/cookie_jar.h"
#include "se2fa/error.h"

namespace se2fa {
namespace {

using std::chrono::seconds;

const Timestamp kNow{seconds{1718000000}};
const Origin kOrigin{"https", "www.example.test", "/account/login"};

CookieRecord make(std::string name, std::string value, std::string domain = "example.test") {
  CookieRecord r;
  r.name = std::move(name);
  r.value = std::move(value);
  r.domain = std::move(domain);
  r.created_at = kNow;
  return r;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(ParseSetCookie, TrustCookieWithFlags) {
  auto r = parse_set_cookie("trust=abc; Secure; HttpOnly; Max-Age=2592000", kOrigin, kNow);
  EXPECT_EQ(r.name, "trust");
  EXPECT_EQ(r.value, "abc");
  EXPECT_TRUE(r.secure);
  EXPECT_TRUE(r.http_only);
  EXPECT_EQ(r.expires_at, kNow + seconds{30 * 86400});
  EXPECT_EQ(r.domain, "www.example.test");
  EXPECT_EQ(r.path, "/account");
}

TEST(ParseSetCookie, BareCookieDefaults) {
  auto r = parse_set_cookie("sid=1", kOrigin, kNow);
  EXPECT_FALSE(r.secure);
  EXPECT_FALSE(r.http_only);
  EXPECT_TRUE(r.is_session());
  EXPECT_EQ(r.same_site, SameSite::kUnspecified);
}

TEST(ParseSetCookie, MaxAgeBeatsExpiresInEitherOrder) {
  auto a = parse_set_cookie("a=1; Expires=Thu, 01 Jan 1970 00:00:00 GMT; Max-Age=60", kOrigin,
                            kNow);
  EXPECT_EQ(a.expires_at, kNow + seconds{60});
  auto b = parse_set_cookie("a=1; Max-Age=60; Expires=Thu, 01 Jan 1970 00:00:00 GMT", kOrigin,
                            kNow);
  EXPECT_EQ(b.expires_at, kNow + seconds{60});
}

TEST(ParseSetCookie, ExpiresAloneAndNonPositiveMaxAge) {
  auto e = parse_set_cookie("a=1; Expires=Wed, 09 Jun 2021 10:18:14 GMT", kOrigin, kNow);
  EXPECT_EQ(e.expires_at, Timestamp{seconds{1623233894}});
  auto z = parse_set_cookie("a=1; Max-Age=0", kOrigin, kNow);
  ASSERT_TRUE(z.expires_at);
  EXPECT_TRUE(z.expired(kNow));
  auto n = parse_set_cookie("a=1; Max-Age=-5", kOrigin, kNow);
  EXPECT_TRUE(n.expired(kNow));
  auto bad = parse_set_cookie("a=1; Max-Age=1x", kOrigin, kNow);
  EXPECT_TRUE(bad.is_session());
}

TEST(ParseSetCookie, AttributesAreCaseInsensitiveAndUnknownIgnored) {
  auto r = parse_set_cookie("k=v; SECURE; httponly; samesite=strict; Priority=High; Foo", kOrigin,
                            kNow);
  EXPECT_TRUE(r.secure);
  EXPECT_TRUE(r.http_only);
  EXPECT_EQ(r.same_site, SameSite::kStrict);
}

TEST(ParseSetCookie, DomainAndPath) {
  auto r = parse_set_cookie("k=v; Domain=.Example.TEST; Path=/", kOrigin, kNow);
  EXPECT_EQ(r.domain, "example.test");
  EXPECT_EQ(r.path, "/");
  auto rel = parse_set_cookie("k=v; Path=relative", kOrigin, kNow);
  EXPECT_EQ(rel.path, "/account");
  auto root = parse_set_cookie("k=v", Origin{"https", "example.test", "/login"}, kNow);
  EXPECT_EQ(root.path, "/");
}

TEST(ParseSetCookie, Errors) {
  EXPECT_EQ(code_of([] { parse_set_cookie("novalue", kOrigin, kNow); }),
            ErrorCode::kMalformedCookie);
  EXPECT_EQ(code_of([] { parse_set_cookie("=v", kOrigin, kNow); }), ErrorCode::kMalformedCookie);
  EXPECT_EQ(code_of([] { parse_set_cookie("", kOrigin, kNow); }), ErrorCode::kMalformedCookie);
  EXPECT_EQ(code_of([] { parse_set_cookie("k=v; Domain=other.test", kOrigin, kNow); }),
            ErrorCode::kForeignDomain);
  EXPECT_EQ(code_of([] { parse_set_cookie("k=v; Domain=ample.test", kOrigin, kNow); }),
            ErrorCode::kForeignDomain);
}

TEST(ParseSetCookie, FormatRoundTrip) {
  CookieRecord r = make("trust", "abc", "www.example.test");
  r.path = "/";
  r.secure = true;
  r.http_only = true;
  r.same_site = SameSite::kLax;
  r.expires_at = kNow + seconds{86400};
  auto header = format_set_cookie(r, kNow);
  EXPECT_EQ(header, "trust=abc; Path=/; Max-Age=86400; Secure; HttpOnly; SameSite=Lax");
  EXPECT_EQ(parse_set_cookie(header, kOrigin, kNow), r);
}

TEST(Matching, DomainAndPath) {
  EXPECT_TRUE(domain_matches("a.example.test", "example.test"));
  EXPECT_TRUE(domain_matches("example.test", "example.test"));
  EXPECT_FALSE(domain_matches("badexample.test", "example.test"));
  EXPECT_FALSE(domain_matches("10.0.0.1", "0.0.1"));
  EXPECT_TRUE(path_matches("/account/x", "/account"));
  EXPECT_TRUE(path_matches("/account/x", "/account/"));
  EXPECT_FALSE(path_matches("/accounts", "/account"));
  EXPECT_EQ(default_cookie_path("/a/b/c"), "/a/b");
  EXPECT_EQ(default_cookie_path("nopath"), "/");
}

TEST(Diff, EmptyToOne) {
  CookieSnapshot before("b", kNow, {});
  CookieSnapshot after("a", kNow, {make("trust", "x")});
  auto d = diff_snapshots(before, after);
  ASSERT_EQ(d.added.size(), 1u);
  EXPECT_EQ(d.added[0].name, "trust");
  EXPECT_TRUE(d.removed.empty());
  EXPECT_TRUE(d.changed.empty());
}

TEST(Diff, IdenticalIsEmpty) {
  CookieSnapshot s("s", kNow, {make("sid", "1"), make("x", "2")});
  EXPECT_TRUE(diff_snapshots(s, s).empty());
}

TEST(Diff, AttributeOnlyChangeIsChanged) {
  auto sid = make("sid", "1");
  auto sid_flipped = sid;
  sid_flipped.http_only = true;
  CookieSnapshot before("b", kNow, {sid});
  CookieSnapshot after("a", kNow, {sid_flipped, make("trust", "x")});
  auto d = diff_snapshots(before, after);
  ASSERT_EQ(d.changed.size(), 1u);
  EXPECT_EQ(d.changed[0].first.name, "sid");
  ASSERT_EQ(d.added.size(), 1u);
  EXPECT_EQ(d.added[0].name, "trust");
  EXPECT_EQ(apply_diff(before, d, "a", kNow), after);
  EXPECT_EQ(d.introduced_keys(), (std::set<CookieKey>{sid.key(), make("trust", "x").key()}));
}

TEST(ToggleMask, Cases) {
  auto c1 = make("c1", "1"), c2 = make("c2", "2"), c3 = make("c3", "3");
  CookieSnapshot s("s", kNow, {c1, c2, c3});
  EXPECT_EQ(apply_toggle_mask(s, s.keys()), s);
  EXPECT_TRUE(apply_toggle_mask(s, {}).empty());
  auto only = apply_toggle_mask(s, {c2.key()});
  ASSERT_EQ(only.size(), 1u);
  EXPECT_EQ(only.cookies()[0], c2);
  EXPECT_EQ(code_of([&] { apply_toggle_mask(s, {make("nope", "").key()}); }),
            ErrorCode::kUnknownKey);
}

TEST(Snapshot, DuplicateKeyIsFormatErrorWithIndex) {
  try {
    CookieSnapshot("s", kNow, {make("a", "1"), make("b", "1"), make("a", "2")});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormatError);
    EXPECT_EQ(e.index(), 2u);
  }
}

TEST(Serialization, EmptySnapshotExactBytes) {
  CookieSnapshot s("l", kNow, {});
  auto bytes = serialize_snapshot(s);
  EXPECT_EQ(bytes, R"({"label":"l","takenAt":"2024-06-10T06:13:20Z","cookies":[]})");
  EXPECT_EQ(parse_snapshot(bytes), s);
}

TEST(Serialization, SessionCookieIsNull) {
  CookieSnapshot s("l", kNow, {make("sid", "1")});
  auto j = Json::parse(serialize_snapshot(s));
  EXPECT_TRUE(j["cookies"][0]["expiresAt"].is_null());
  EXPECT_TRUE(j["cookies"][0]["sameSite"].is_null());
  std::vector<std::string> keys;
  for (auto it = j["cookies"][0].begin(); it != j["cookies"][0].end(); ++it) {
    keys.push_back(it.key());
  }
  EXPECT_EQ(keys, (std::vector<std::string>{"name", "value", "domain", "path", "secure",
                                            "httpOnly", "sameSite", "expiresAt", "createdAt"}));
  EXPECT_EQ(parse_snapshot(serialize_snapshot(s)), s);
}

TEST(Serialization, FormatErrorCarriesRecordIndex) {
  auto good = cookie_to_json(make("a", "1"));
  auto bad = good;
  bad["name"] = "b";
  bad["secure"] = "yes";
  Json j{{"label", "l"}, {"takenAt", "2024-06-10T06:13:20Z"}, {"cookies", {good, bad}}};
  try {
    snapshot_from_json(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormatError);
    EXPECT_EQ(e.index(), 1u);
  }
  EXPECT_EQ(code_of([] { parse_snapshot("{not json"); }), ErrorCode::kFormatError);
  EXPECT_EQ(code_of([] { parse_snapshot(R"({"label":"l","takenAt":"x","cookies":[]})"); }),
            ErrorCode::kFormatError);
  auto bad_ss = good;
  bad_ss["sameSite"] = "lax";
  EXPECT_EQ(code_of([&] { cookie_from_json(bad_ss); }), ErrorCode::kFormatError);
}

TEST(Jar, SecureCookiesWithheldOnPlainChannel) {
  CookieJar jar;
  auto s = make("s", "1");
  s.secure = true;
  jar.store(s, kNow);
  jar.store(make("p", "2"), kNow);
  EXPECT_EQ(jar.cookies_for("example.test", "/", true, kNow).size(), 2u);
  auto plain = jar.cookies_for("example.test", "/", false, kNow);
  ASSERT_EQ(plain.size(), 1u);
  EXPECT_EQ(plain[0].name, "p");
  EXPECT_EQ(jar.cookie_header("example.test", "/", false, kNow), "p=2");
}

TEST(Jar, ExpiredCookiesPurgedOnAccess) {
  CookieJar jar;
  auto e = make("e", "1");
  e.expires_at = kNow + seconds{10};
  jar.store(e, kNow);
  EXPECT_EQ(jar.size(), 1u);
  EXPECT_TRUE(jar.cookies_for("example.test", "/", true, kNow + seconds{10}).empty());
  EXPECT_EQ(jar.size(), 0u);
}

TEST(Jar, ServerDeletionByExpiredHeader) {
  CookieJar jar;
  Origin o{"https", "example.test", "/"};
  ASSERT_TRUE(jar.store_from_header("k=v; Max-Age=100", o, kNow));
  ASSERT_TRUE(jar.store_from_header("k=; Max-Age=0", o, kNow));
  EXPECT_TRUE(jar.empty());
  EXPECT_FALSE(jar.store_from_header("k=v; Domain=evil.test", o, kNow));
  EXPECT_FALSE(jar.store_from_header("garbage", o, kNow));
}

TEST(Jar, LongestPathFirstAndHostScoping) {
  CookieJar jar;
  auto a = make("a", "1");
  auto b = make("b", "2");
  b.path = "/account";
  jar.store(a, kNow);
  jar.store(b, kNow);
  EXPECT_EQ(jar.cookie_header("www.example.test", "/account/x", true, kNow), "b=2; a=1");
  EXPECT_EQ(jar.cookie_header("other.test", "/", true, kNow), "");
}

TEST(Jar, SnapshotImportReplace) {
  CookieJar jar;
  jar.store(make("a", "1"), kNow);
  auto snap = jar.snapshot("one", kNow);
  CookieJar other;
  other.store(make("a", "old"), kNow);
  other.store(make("z", "9"), kNow);
  other.import(snap, kNow);
  EXPECT_EQ(other.size(), 2u);
  EXPECT_EQ(other.snapshot("x", kNow).find(make("a", "").key())->value, "1");
  other.replace_with(snap, kNow);
  EXPECT_EQ(other.snapshot("one", kNow), snap);
}

}  // namespace
}  // namespace se2fa
