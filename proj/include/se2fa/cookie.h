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

#ifndef SE2FA_COOKIE_H_
#define SE2FA_COOKIE_H_

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "se2fa/clock.h"

namespace se2fa {

using Json = nlohmann::ordered_json;

enum class SameSite { kUnspecified, kStrict, kLax, kNone };

// Browser-jar identity of a cookie. Ordered by (domain, path, name), which
// is also the serialization order of a snapshot.
struct CookieKey {
  std::string name;
  std::string domain;
  std::string path;

  friend bool operator==(const CookieKey&, const CookieKey&) = default;
  friend std::strong_ordering operator<=>(const CookieKey& a, const CookieKey& b) {
    if (auto c = a.domain <=> b.domain; c != 0) return c;
    if (auto c = a.path <=> b.path; c != 0) return c;
    return a.name <=> b.name;
  }
};

std::string to_string(const CookieKey& key);

struct CookieRecord {
  std::string name;
  std::string value;
  std::string domain;
  std::string path = "/";
  bool secure = false;
  bool http_only = false;
  SameSite same_site = SameSite::kUnspecified;
  // nullopt means a session cookie.
  std::optional<Timestamp> expires_at;
  Timestamp created_at{};

  CookieKey key() const { return {name, domain, path}; }
  bool is_session() const { return !expires_at.has_value(); }
  bool expired(Timestamp now) const { return expires_at && *expires_at <= now; }

  friend bool operator==(const CookieRecord&, const CookieRecord&) = default;
};

// Request origin a Set-Cookie header was received from.
struct Origin {
  std::string scheme = "https";
  std::string host;
  std::string path = "/";
};

// Parses one Set-Cookie header value (RFC 6265 section 5.2). Unknown
// attributes are ignored; Max-Age takes precedence over Expires. Throws
// Error(kMalformedCookie) for an empty name or missing '=', and
// Error(kForeignDomain) when a Domain attribute does not cover origin.host.
CookieRecord parse_set_cookie(std::string_view header, const Origin& origin, Timestamp now);

// Renders a record as a Set-Cookie header value. Expiry is written as
// Max-Age relative to `now` (session cookies carry neither attribute).
std::string format_set_cookie(const CookieRecord& record, Timestamp now);

// RFC 6265 default-path of a request path.
std::string default_cookie_path(std::string_view request_path);
bool domain_matches(std::string_view host, std::string_view cookie_domain);
bool path_matches(std::string_view request_path, std::string_view cookie_path);

// Immutable, ordered, key-unique capture of a jar.
class CookieSnapshot {
 public:
  CookieSnapshot() = default;
  // Sorts the records. Throws Error(kFormatError) with the record index on a
  // duplicate key.
  CookieSnapshot(std::string label, Timestamp taken_at, std::vector<CookieRecord> cookies);

  const std::string& label() const { return label_; }
  Timestamp taken_at() const { return taken_at_; }
  const std::vector<CookieRecord>& cookies() const { return cookies_; }
  std::size_t size() const { return cookies_.size(); }
  bool empty() const { return cookies_.empty(); }

  const CookieRecord* find(const CookieKey& key) const;
  std::set<CookieKey> keys() const;

  friend bool operator==(const CookieSnapshot&, const CookieSnapshot&) = default;

 private:
  std::string label_;
  Timestamp taken_at_{};
  std::vector<CookieRecord> cookies_;
};

struct SnapshotDiff {
  std::vector<CookieRecord> added;
  std::vector<CookieRecord> removed;
  std::vector<std::pair<CookieRecord, CookieRecord>> changed;

  bool empty() const { return added.empty() && removed.empty() && changed.empty(); }
  // Keys of added and changed records: the candidates a remember flow
  // introduced.
  std::set<CookieKey> introduced_keys() const;
};

SnapshotDiff diff_snapshots(const CookieSnapshot& before, const CookieSnapshot& after);

// Replays `diff` onto `before`. The result carries `label` and `taken_at`.
CookieSnapshot apply_diff(const CookieSnapshot& before, const SnapshotDiff& diff,
                          std::string label, Timestamp taken_at);

// Keeps exactly the records whose keys are in `enabled`. Throws
// Error(kUnknownKey) if `enabled` names a key the snapshot lacks.
CookieSnapshot apply_toggle_mask(const CookieSnapshot& snapshot,
                                 const std::set<CookieKey>& enabled);

// Interchange format (UTF-8 JSON).
std::string serialize_snapshot(const CookieSnapshot& snapshot);
CookieSnapshot parse_snapshot(std::string_view bytes);

Json cookie_to_json(const CookieRecord& record);
// Throws Error(kFormatError, index) on schema violations.
CookieRecord cookie_from_json(const Json& j, std::size_t index = 0);
Json snapshot_to_json(const CookieSnapshot& snapshot);
CookieSnapshot snapshot_from_json(const Json& j);
Json diff_to_json(const SnapshotDiff& diff);
Json key_to_json(const CookieKey& key);
CookieKey key_from_json(const Json& j);

std::string_view same_site_name(SameSite s);

// Name must be a non-empty RFC 6265 token.
bool is_valid_cookie_name(std::string_view name);

}  // namespace se2fa

#endif  // SE2FA_COOKIE_H_
