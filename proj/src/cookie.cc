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

#include <algorithm>
#include <cctype>
#include <map>

#include "se2fa/error.h"
#include "se2fa/time_util.h"

namespace se2fa {
namespace {

bool is_ctl(unsigned char c) { return c < 0x20 || c == 0x7F; }
bool is_wsp(char c) { return c == ' ' || c == '\t'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_wsp(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_wsp(s.back())) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t n = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c >> 5) == 0x6) {
      n = 1;
      cp = c & 0x1F;
    } else if ((c >> 4) == 0xE) {
      n = 2;
      cp = c & 0x0F;
    } else if ((c >> 3) == 0x1E) {
      n = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    for (std::size_t k = 1; k <= n; ++k) {
      if (i + k >= s.size()) return false;
      auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc >> 6) != 0x2) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates and out-of-range code points.
    if ((n == 1 && cp < 0x80) || (n == 2 && cp < 0x800) || (n == 3 && cp < 0x10000) ||
        cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += n + 1;
  }
  return true;
}

bool is_ip_literal(std::string_view host) {
  if (host.find(':') != std::string_view::npos) return true;
  return !host.empty() && std::all_of(host.begin(), host.end(), [](char c) {
    return (c >= '0' && c <= '9') || c == '.';
  });
}

Timestamp from_max_age(std::string_view v, Timestamp now) {
  bool negative = v.front() == '-';
  std::string_view digits = negative ? v.substr(1) : v;
  if (negative) return min_timestamp();
  // Anything beyond 12 digits is past year 9999 anyway.
  if (digits.size() > 12) return max_timestamp();
  long long delta = 0;
  for (char c : digits) delta = delta * 10 + (c - '0');
  if (delta <= 0) return min_timestamp();
  auto limit = max_timestamp();
  if (delta >= (limit - now).count()) return limit;
  return now + std::chrono::seconds{delta};
}

SameSite same_site_from(std::string_view v) {
  auto l = lower(v);
  if (l == "strict") return SameSite::kStrict;
  if (l == "lax") return SameSite::kLax;
  if (l == "none") return SameSite::kNone;
  return SameSite::kUnspecified;
}

Error format_error(std::size_t index, const std::string& what) {
  return Error(ErrorCode::kFormatError, "record " + std::to_string(index) + ": " + what, index);
}

const Json& require(const Json& j, const char* field, std::size_t index) {
  auto it = j.find(field);
  if (it == j.end()) throw format_error(index, std::string("missing field '") + field + "'");
  return *it;
}

std::string require_string(const Json& j, const char* field, std::size_t index) {
  const auto& v = require(j, field, index);
  if (!v.is_string()) throw format_error(index, std::string("'") + field + "' must be a string");
  return v.get<std::string>();
}

bool require_bool(const Json& j, const char* field, std::size_t index) {
  const auto& v = require(j, field, index);
  if (!v.is_boolean()) throw format_error(index, std::string("'") + field + "' must be a bool");
  return v.get<bool>();
}

Timestamp require_time(const Json& j, const char* field, std::size_t index) {
  auto t = parse_rfc3339(require_string(j, field, index));
  if (!t) throw format_error(index, std::string("'") + field + "' is not RFC 3339");
  return *t;
}

}  // namespace

std::string to_string(const CookieKey& key) {
  return key.name + "@" + key.domain + key.path;
}

bool is_valid_cookie_name(std::string_view name) {
  if (name.empty()) return false;
  return std::none_of(name.begin(), name.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return c == '=' || c == ';' || is_ctl(u) || is_wsp(c);
  });
}

std::string_view same_site_name(SameSite s) {
  switch (s) {
    case SameSite::kStrict: return "Strict";
    case SameSite::kLax: return "Lax";
    case SameSite::kNone: return "None";
    case SameSite::kUnspecified: return "";
  }
  return "";
}

std::string default_cookie_path(std::string_view request_path) {
  if (request_path.empty() || request_path.front() != '/') return "/";
  auto q = request_path.find_first_of("?#");
  if (q != std::string_view::npos) request_path = request_path.substr(0, q);
  auto last = request_path.rfind('/');
  if (last == 0 || last == std::string_view::npos) return "/";
  return std::string(request_path.substr(0, last));
}

bool domain_matches(std::string_view host, std::string_view cookie_domain) {
  if (host == cookie_domain) return true;
  if (is_ip_literal(host) || cookie_domain.empty()) return false;
  return host.size() > cookie_domain.size() && host.ends_with(cookie_domain) &&
         host[host.size() - cookie_domain.size() - 1] == '.';
}

bool path_matches(std::string_view request_path, std::string_view cookie_path) {
  if (request_path.empty()) request_path = "/";
  if (request_path == cookie_path) return true;
  if (!request_path.starts_with(cookie_path)) return false;
  return cookie_path.back() == '/' || request_path[cookie_path.size()] == '/';
}

CookieRecord parse_set_cookie(std::string_view header, const Origin& origin, Timestamp now) {
  auto semi = header.find(';');
  std::string_view pair = header.substr(0, semi);
  auto eq = pair.find('=');
  if (eq == std::string_view::npos) {
    throw Error(ErrorCode::kMalformedCookie, "name-value pair has no '='");
  }
  std::string_view name = trim(pair.substr(0, eq));
  std::string_view value = trim(pair.substr(eq + 1));
  if (name.empty()) throw Error(ErrorCode::kMalformedCookie, "empty cookie name");
  if (!is_valid_cookie_name(name) || !valid_utf8(name)) {
    throw Error(ErrorCode::kMalformedCookie, "invalid characters in cookie name");
  }
  if (std::any_of(value.begin(), value.end(),
                  [](char c) { return is_ctl(static_cast<unsigned char>(c)) && c != '\t'; }) ||
      !valid_utf8(value)) {
    throw Error(ErrorCode::kMalformedCookie, "invalid characters in cookie value");
  }

  CookieRecord rec;
  rec.name = std::string(name);
  rec.value = std::string(value);
  rec.created_at = now;
  std::string host = lower(origin.host);

  std::optional<Timestamp> expires, max_age;
  std::optional<std::string> domain_attr;
  std::optional<std::string> path_attr;

  std::string_view rest = semi == std::string_view::npos ? std::string_view{}
                                                         : header.substr(semi + 1);
  while (!rest.empty()) {
    auto next = rest.find(';');
    std::string_view av = rest.substr(0, next);
    rest = next == std::string_view::npos ? std::string_view{} : rest.substr(next + 1);
    auto aeq = av.find('=');
    std::string attr = lower(trim(av.substr(0, aeq)));
    std::string_view aval = aeq == std::string_view::npos ? std::string_view{}
                                                          : trim(av.substr(aeq + 1));
    if (attr == "expires") {
      if (auto t = parse_cookie_date(aval)) expires = t;
    } else if (attr == "max-age") {
      if (aval.empty()) continue;
      if (!(std::isdigit(static_cast<unsigned char>(aval.front())) || aval.front() == '-')) {
        continue;
      }
      std::string_view digits = aval.front() == '-' ? aval.substr(1) : aval;
      if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) {
            return std::isdigit(static_cast<unsigned char>(c));
          })) {
        continue;
      }
      max_age = from_max_age(aval, now);
    } else if (attr == "domain") {
      if (aval.empty()) continue;
      std::string d = lower(aval);
      if (d.front() == '.') d.erase(0, 1);
      domain_attr = d;
    } else if (attr == "path") {
      path_attr = (aval.empty() || aval.front() != '/') ? default_cookie_path(origin.path)
                                                        : std::string(aval);
    } else if (attr == "secure") {
      rec.secure = true;
    } else if (attr == "httponly") {
      rec.http_only = true;
    } else if (attr == "samesite") {
      rec.same_site = same_site_from(aval);
    }
  }

  if (max_age) rec.expires_at = max_age;
  else if (expires) rec.expires_at = std::clamp(*expires, min_timestamp(), max_timestamp());

  if (domain_attr && !domain_attr->empty()) {
    if (!domain_matches(host, *domain_attr)) {
      throw Error(ErrorCode::kForeignDomain,
                  "Domain=" + *domain_attr + " does not cover host " + host);
    }
    rec.domain = *domain_attr;
  } else {
    rec.domain = host;
  }
  rec.path = path_attr ? *path_attr : default_cookie_path(origin.path);
  return rec;
}

std::string format_set_cookie(const CookieRecord& record, Timestamp now) {
  std::string out = record.name + "=" + record.value + "; Path=" + record.path;
  if (record.expires_at) {
    auto delta = (*record.expires_at - now).count();
    out += "; Max-Age=" + std::to_string(delta > 0 ? delta : 0);
  }
  if (record.secure) out += "; Secure";
  if (record.http_only) out += "; HttpOnly";
  if (record.same_site != SameSite::kUnspecified) {
    out += "; SameSite=" + std::string(same_site_name(record.same_site));
  }
  return out;
}

CookieSnapshot::CookieSnapshot(std::string label, Timestamp taken_at,
                               std::vector<CookieRecord> cookies)
    : label_(std::move(label)), taken_at_(taken_at), cookies_(std::move(cookies)) {
  std::map<CookieKey, std::size_t> seen;
  for (std::size_t i = 0; i < cookies_.size(); ++i) {
    if (!seen.emplace(cookies_[i].key(), i).second) {
      throw format_error(i, "duplicate key " + to_string(cookies_[i].key()));
    }
  }
  std::sort(cookies_.begin(), cookies_.end(),
            [](const CookieRecord& a, const CookieRecord& b) { return a.key() < b.key(); });
}

const CookieRecord* CookieSnapshot::find(const CookieKey& key) const {
  auto it = std::lower_bound(cookies_.begin(), cookies_.end(), key,
                             [](const CookieRecord& r, const CookieKey& k) { return r.key() < k; });
  if (it == cookies_.end() || it->key() != key) return nullptr;
  return &*it;
}

std::set<CookieKey> CookieSnapshot::keys() const {
  std::set<CookieKey> out;
  for (const auto& c : cookies_) out.insert(c.key());
  return out;
}

std::set<CookieKey> SnapshotDiff::introduced_keys() const {
  std::set<CookieKey> out;
  for (const auto& r : added) out.insert(r.key());
  for (const auto& [before, after] : changed) out.insert(after.key());
  return out;
}

SnapshotDiff diff_snapshots(const CookieSnapshot& before, const CookieSnapshot& after) {
  SnapshotDiff d;
  const auto& a = before.cookies();
  const auto& b = after.cookies();
  std::size_t i = 0, j = 0;
  // Both sides are sorted by key: a linear merge.
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].key() < b[j].key())) {
      d.removed.push_back(a[i++]);
    } else if (i == a.size() || b[j].key() < a[i].key()) {
      d.added.push_back(b[j++]);
    } else {
      if (a[i] != b[j]) d.changed.emplace_back(a[i], b[j]);
      ++i;
      ++j;
    }
  }
  return d;
}

CookieSnapshot apply_diff(const CookieSnapshot& before, const SnapshotDiff& diff,
                          std::string label, Timestamp taken_at) {
  std::map<CookieKey, CookieRecord> jar;
  for (const auto& c : before.cookies()) jar.emplace(c.key(), c);
  for (const auto& r : diff.removed) jar.erase(r.key());
  for (const auto& [old_rec, new_rec] : diff.changed) jar[new_rec.key()] = new_rec;
  for (const auto& r : diff.added) jar[r.key()] = r;
  std::vector<CookieRecord> out;
  out.reserve(jar.size());
  for (auto& [k, v] : jar) out.push_back(std::move(v));
  return CookieSnapshot(std::move(label), taken_at, std::move(out));
}

CookieSnapshot apply_toggle_mask(const CookieSnapshot& snapshot,
                                 const std::set<CookieKey>& enabled) {
  for (const auto& k : enabled) {
    if (!snapshot.find(k)) throw Error(ErrorCode::kUnknownKey, "no cookie " + to_string(k));
  }
  std::vector<CookieRecord> kept;
  for (const auto& c : snapshot.cookies()) {
    if (enabled.count(c.key())) kept.push_back(c);
  }
  return CookieSnapshot(snapshot.label(), snapshot.taken_at(), std::move(kept));
}

Json key_to_json(const CookieKey& key) {
  return Json{{"name", key.name}, {"domain", key.domain}, {"path", key.path}};
}

CookieKey key_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kFormatError, "cookie key must be an object");
  return {require_string(j, "name", 0), j.value("domain", std::string{}),
          j.value("path", std::string{"/"})};
}

Json cookie_to_json(const CookieRecord& r) {
  Json j;
  j["name"] = r.name;
  j["value"] = r.value;
  j["domain"] = r.domain;
  j["path"] = r.path;
  j["secure"] = r.secure;
  j["httpOnly"] = r.http_only;
  if (r.same_site == SameSite::kUnspecified) {
    j["sameSite"] = nullptr;
  } else {
    j["sameSite"] = std::string(same_site_name(r.same_site));
  }
  if (r.expires_at) j["expiresAt"] = format_rfc3339(*r.expires_at);
  else j["expiresAt"] = nullptr;
  j["createdAt"] = format_rfc3339(r.created_at);
  return j;
}

CookieRecord cookie_from_json(const Json& j, std::size_t index) {
  if (!j.is_object()) throw format_error(index, "cookie must be an object");
  CookieRecord r;
  r.name = require_string(j, "name", index);
  if (!is_valid_cookie_name(r.name)) throw format_error(index, "invalid cookie name");
  r.value = require_string(j, "value", index);
  r.domain = require_string(j, "domain", index);
  r.path = require_string(j, "path", index);
  r.secure = require_bool(j, "secure", index);
  r.http_only = require_bool(j, "httpOnly", index);
  const auto& ss = require(j, "sameSite", index);
  if (ss.is_null()) {
    r.same_site = SameSite::kUnspecified;
  } else if (ss.is_string() && (ss == "Strict" || ss == "Lax" || ss == "None")) {
    r.same_site = same_site_from(ss.get<std::string>());
  } else {
    throw format_error(index, "'sameSite' must be \"Strict\", \"Lax\", \"None\" or null");
  }
  const auto& exp = require(j, "expiresAt", index);
  if (!exp.is_null()) r.expires_at = require_time(j, "expiresAt", index);
  r.created_at = require_time(j, "createdAt", index);
  return r;
}

Json snapshot_to_json(const CookieSnapshot& s) {
  Json j;
  j["label"] = s.label();
  j["takenAt"] = format_rfc3339(s.taken_at());
  j["cookies"] = Json::array();
  for (const auto& c : s.cookies()) j["cookies"].push_back(cookie_to_json(c));
  return j;
}

CookieSnapshot snapshot_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kFormatError, "snapshot must be a JSON object");
  auto label_it = j.find("label");
  auto taken_it = j.find("takenAt");
  auto cookies_it = j.find("cookies");
  if (label_it == j.end() || !label_it->is_string()) {
    throw Error(ErrorCode::kFormatError, "snapshot 'label' must be a string");
  }
  if (taken_it == j.end() || !taken_it->is_string()) {
    throw Error(ErrorCode::kFormatError, "snapshot 'takenAt' must be a string");
  }
  auto taken = parse_rfc3339(taken_it->get<std::string>());
  if (!taken) throw Error(ErrorCode::kFormatError, "snapshot 'takenAt' is not RFC 3339");
  if (cookies_it == j.end() || !cookies_it->is_array()) {
    throw Error(ErrorCode::kFormatError, "snapshot 'cookies' must be an array");
  }
  std::vector<CookieRecord> cookies;
  cookies.reserve(cookies_it->size());
  for (std::size_t i = 0; i < cookies_it->size(); ++i) {
    cookies.push_back(cookie_from_json((*cookies_it)[i], i));
  }
  return CookieSnapshot(label_it->get<std::string>(), *taken, std::move(cookies));
}

std::string serialize_snapshot(const CookieSnapshot& snapshot) {
  return snapshot_to_json(snapshot).dump();
}

CookieSnapshot parse_snapshot(std::string_view bytes) {
  Json j = Json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kFormatError, "not valid JSON");
  return snapshot_from_json(j);
}

Json diff_to_json(const SnapshotDiff& diff) {
  Json j;
  j["added"] = Json::array();
  j["removed"] = Json::array();
  j["changed"] = Json::array();
  for (const auto& r : diff.added) j["added"].push_back(cookie_to_json(r));
  for (const auto& r : diff.removed) j["removed"].push_back(cookie_to_json(r));
  for (const auto& [b, a] : diff.changed) {
    j["changed"].push_back(Json{{"before", cookie_to_json(b)}, {"after", cookie_to_json(a)}});
  }
  return j;
}

}  // namespace se2fa
