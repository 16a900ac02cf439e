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

#include "se2fa/time_util.h"

#include <array>
#include <cctype>
#include <cstdio>

namespace se2fa {
namespace {

using namespace std::chrono;

constexpr std::array<std::string_view, 12> kMonths = {
    "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec"};
constexpr std::array<std::string_view, 7> kWeekdays = {"Sun", "Mon", "Tue", "Wed",
                                                       "Thu", "Fri", "Sat"};

std::optional<Timestamp> make_timestamp(int y, unsigned mo, unsigned d, int h, int mi, int s) {
  year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60) {
    return std::nullopt;
  }
  // Leap seconds fold into the next second.
  return Timestamp{sys_days{ymd}.time_since_epoch()} + hours{h} + minutes{mi} + seconds{s};
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Parses exactly `n` digits at text[pos].
std::optional<int> fixed_digits(std::string_view text, std::size_t pos, std::size_t n) {
  if (pos + n > text.size()) return std::nullopt;
  int v = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_digit(text[pos + i])) return std::nullopt;
    v = v * 10 + (text[pos + i] - '0');
  }
  return v;
}

bool is_cookie_date_delimiter(unsigned char c) {
  return c == 0x09 || (c >= 0x20 && c <= 0x2F) || (c >= 0x3B && c <= 0x40) ||
         (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E);
}

// time = hms-time ( non-digit *OCTET ); hms-time = 1*2DIGIT ":" 1*2DIGIT ":" 1*2DIGIT
bool parse_time_token(std::string_view tok, int& h, int& m, int& s) {
  int parts[3] = {0, 0, 0};
  std::size_t i = 0;
  for (int p = 0; p < 3; ++p) {
    std::size_t start = i;
    int v = 0;
    while (i < tok.size() && is_digit(tok[i]) && i - start < 2) v = v * 10 + (tok[i++] - '0');
    if (i == start) return false;
    if (i < tok.size() && is_digit(tok[i])) return false;
    parts[p] = v;
    if (p < 2) {
      if (i >= tok.size() || tok[i] != ':') return false;
      ++i;
    }
  }
  h = parts[0];
  m = parts[1];
  s = parts[2];
  return true;
}

// Leading 1*n digits followed by end or a non-digit.
std::optional<int> leading_digits(std::string_view tok, std::size_t min, std::size_t max) {
  std::size_t i = 0;
  int v = 0;
  while (i < tok.size() && is_digit(tok[i])) {
    if (i == max) return std::nullopt;
    v = v * 10 + (tok[i] - '0');
    ++i;
  }
  if (i < min) return std::nullopt;
  return v;
}

}  // namespace

Timestamp max_timestamp() {
  return Timestamp{sys_days{year{9999} / December / 31}.time_since_epoch()} + hours{23} +
         minutes{59} + seconds{59};
}

Timestamp min_timestamp() { return Timestamp{seconds{0}}; }

std::string format_rfc3339(Timestamp t) {
  auto dp = floor<days>(t);
  year_month_day ymd{dp};
  hh_mm_ss hms{t - dp};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

std::string format_iso_date(Timestamp t) { return format_rfc3339(t).substr(0, 10); }

std::optional<Timestamp> parse_rfc3339(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SS[.frac](Z|+hh:mm|-hh:mm)
  if (text.size() < 20) return std::nullopt;
  auto y = fixed_digits(text, 0, 4), mo = fixed_digits(text, 5, 2), d = fixed_digits(text, 8, 2);
  auto h = fixed_digits(text, 11, 2), mi = fixed_digits(text, 14, 2),
       s = fixed_digits(text, 17, 2);
  if (!y || !mo || !d || !h || !mi || !s) return std::nullopt;
  if (text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != 't') ||
      text[13] != ':' || text[16] != ':') {
    return std::nullopt;
  }
  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    std::size_t start = pos;
    while (pos < text.size() && is_digit(text[pos])) ++pos;
    if (pos == start) return std::nullopt;
  }
  if (pos >= text.size()) return std::nullopt;
  int offset_minutes = 0;
  if (text[pos] == 'Z' || text[pos] == 'z') {
    ++pos;
  } else if (text[pos] == '+' || text[pos] == '-') {
    int sign = text[pos] == '-' ? -1 : 1;
    auto oh = fixed_digits(text, pos + 1, 2), om = fixed_digits(text, pos + 4, 2);
    if (!oh || !om || pos + 3 >= text.size() || text[pos + 3] != ':' || *oh > 23 || *om > 59) {
      return std::nullopt;
    }
    offset_minutes = sign * (*oh * 60 + *om);
    pos += 6;
  } else {
    return std::nullopt;
  }
  if (pos != text.size()) return std::nullopt;
  auto t = make_timestamp(*y, static_cast<unsigned>(*mo), static_cast<unsigned>(*d), *h, *mi, *s);
  if (!t) return std::nullopt;
  return *t - minutes{offset_minutes};
}

std::string format_http_date(Timestamp t) {
  auto dp = floor<days>(t);
  year_month_day ymd{dp};
  weekday wd{dp};
  hh_mm_ss hms{t - dp};
  std::string mon(kMonths[static_cast<unsigned>(ymd.month()) - 1]);
  mon[0] = static_cast<char>(std::toupper(mon[0]));
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s, %02u %s %04d %02d:%02d:%02d GMT",
                std::string(kWeekdays[wd.c_encoding()]).c_str(),
                static_cast<unsigned>(ymd.day()), mon.c_str(), static_cast<int>(ymd.year()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

std::optional<Timestamp> parse_cookie_date(std::string_view text) {
  bool found_time = false, found_dom = false, found_month = false, found_year = false;
  int hour = 0, minute = 0, second = 0, dom = 0, mon = 0, yr = 0;

  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_cookie_date_delimiter(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_cookie_date_delimiter(static_cast<unsigned char>(text[i]))) ++i;
    if (start == i) continue;
    std::string_view tok = text.substr(start, i - start);

    int h, m, s;
    if (!found_time && parse_time_token(tok, h, m, s)) {
      found_time = true;
      hour = h;
      minute = m;
      second = s;
      continue;
    }
    if (!found_dom) {
      if (auto v = leading_digits(tok, 1, 2)) {
        found_dom = true;
        dom = *v;
        continue;
      }
    }
    if (!found_month && tok.size() >= 3) {
      std::string prefix;
      for (int k = 0; k < 3; ++k) {
        prefix += static_cast<char>(std::tolower(static_cast<unsigned char>(tok[k])));
      }
      bool matched = false;
      for (std::size_t k = 0; k < kMonths.size(); ++k) {
        if (prefix == kMonths[k]) {
          found_month = true;
          mon = static_cast<int>(k) + 1;
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    if (!found_year) {
      if (auto v = leading_digits(tok, 2, 4)) {
        found_year = true;
        yr = *v;
        continue;
      }
    }
  }

  if (found_year) {
    if (yr >= 70 && yr <= 99) yr += 1900;
    else if (yr >= 0 && yr <= 69) yr += 2000;
  }
  if (!found_time || !found_dom || !found_month || !found_year) return std::nullopt;
  if (dom < 1 || dom > 31 || yr < 1601 || hour > 23 || minute > 59 || second > 59) {
    return std::nullopt;
  }
  return make_timestamp(yr, static_cast<unsigned>(mon), static_cast<unsigned>(dom), hour, minute,
                        second);
}

}  // namespace se2fa
