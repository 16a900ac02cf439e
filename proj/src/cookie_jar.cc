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

#include "se2fa/cookie_jar.h"

#include <algorithm>
#include <cctype>

#include "se2fa/error.h"

namespace se2fa {

void CookieJar::store(CookieRecord record, Timestamp now) {
  auto key = record.key();
  if (record.expired(now)) {
    cookies_.erase(key);
    return;
  }
  cookies_.insert_or_assign(std::move(key), std::move(record));
}

bool CookieJar::store_from_header(std::string_view set_cookie, const Origin& origin,
                                  Timestamp now) {
  try {
    store(parse_set_cookie(set_cookie, origin, now), now);
    return true;
  } catch (const Error&) {
    return false;
  }
}

void CookieJar::purge(Timestamp now) {
  std::erase_if(cookies_, [now](const auto& kv) { return kv.second.expired(now); });
}

std::vector<CookieRecord> CookieJar::cookies_for(std::string_view host, std::string_view path,
                                                 bool secure_channel, Timestamp now) {
  purge(now);
  std::string h(host);
  for (auto& c : h) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  std::vector<CookieRecord> out;
  for (const auto& [key, rec] : cookies_) {
    if (rec.secure && !secure_channel) continue;
    if (!domain_matches(h, rec.domain) || !path_matches(path, rec.path)) continue;
    out.push_back(rec);
  }
  std::stable_sort(out.begin(), out.end(), [](const CookieRecord& a, const CookieRecord& b) {
    if (a.path.size() != b.path.size()) return a.path.size() > b.path.size();
    return a.created_at < b.created_at;
  });
  return out;
}

std::string CookieJar::cookie_header(std::string_view host, std::string_view path,
                                     bool secure_channel, Timestamp now) {
  std::string out;
  for (const auto& c : cookies_for(host, path, secure_channel, now)) {
    if (!out.empty()) out += "; ";
    out += c.name + "=" + c.value;
  }
  return out;
}

CookieSnapshot CookieJar::snapshot(std::string label, Timestamp now) {
  purge(now);
  std::vector<CookieRecord> all;
  all.reserve(cookies_.size());
  for (const auto& [k, v] : cookies_) all.push_back(v);
  return CookieSnapshot(std::move(label), now, std::move(all));
}

void CookieJar::import(const CookieSnapshot& s, Timestamp now) {
  for (const auto& c : s.cookies()) store(c, now);
}

void CookieJar::replace_with(const CookieSnapshot& s, Timestamp now) {
  cookies_.clear();
  import(s, now);
}

bool CookieJar::remove(const CookieKey& key) { return cookies_.erase(key) > 0; }

}  // namespace se2fa
