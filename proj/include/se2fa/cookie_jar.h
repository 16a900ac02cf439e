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

#ifndef SE2FA_COOKIE_JAR_H_
#define SE2FA_COOKIE_JAR_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "se2fa/cookie.h"

namespace se2fa {

// Mutable single-owner cookie store of one simulated browser.
class CookieJar {
 public:
  // Inserts or replaces by key. A record that is already expired at `now`
  // deletes the key instead (how servers clear cookies).
  void store(CookieRecord record, Timestamp now);

  // Parses and stores one Set-Cookie value. Returns false if the header was
  // rejected (malformed or foreign domain).
  bool store_from_header(std::string_view set_cookie, const Origin& origin, Timestamp now);

  // Cookies to attach to a request, longest path first. Expired entries are
  // purged; Secure cookies are withheld unless `secure_channel`.
  std::vector<CookieRecord> cookies_for(std::string_view host, std::string_view path,
                                        bool secure_channel, Timestamp now);
  std::string cookie_header(std::string_view host, std::string_view path, bool secure_channel,
                            Timestamp now);

  CookieSnapshot snapshot(std::string label, Timestamp now);

  // Adds every record of `s`, replacing same-key entries.
  void import(const CookieSnapshot& s, Timestamp now);
  void replace_with(const CookieSnapshot& s, Timestamp now);
  bool remove(const CookieKey& key);
  void clear() { cookies_.clear(); }

  std::size_t size() const { return cookies_.size(); }
  bool empty() const { return cookies_.empty(); }

 private:
  void purge(Timestamp now);

  std::map<CookieKey, CookieRecord> cookies_;
};

}  // namespace se2fa

#endif  // SE2FA_COOKIE_JAR_H_
