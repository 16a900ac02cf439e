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


#include "se2fa/capture.h"

#include <cctype>
#include <sstream>

#include "se2fa/error.h"
#include "se2fa/time_util.h"

namespace se2fa {
namespace {

Error bad(std::size_t index, const std::string& what) {
  return Error(ErrorCode::kFormatError, "capture " + std::to_string(index) + ": " + what, index);
}

std::string field(const Json& j, const char* name, std::size_t index) {
  auto it = j.find(name);
  if (it == j.end() || !it->is_string()) throw bad(index, std::string("'") + name + "' must be a string");
  return it->get<std::string>();
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

const char* header_for(CaptureDirection d) {
  return d == CaptureDirection::kRequest ? "Cookie" : "Set-Cookie";
}

}  // namespace

Json capture_to_json(const CaptureRecord& r) {
  Json j;
  j["direction"] = r.direction == CaptureDirection::kRequest ? "request" : "response";
  j["url"] = r.url;
  j["headerName"] = r.header_name;
  j["headerValue"] = r.header_value;
  j["at"] = format_rfc3339(r.at);
  return j;
}

CaptureRecord capture_from_json(const Json& j, std::size_t index) {
  if (!j.is_object()) throw bad(index, "must be an object");
  CaptureRecord r;
  auto dir = field(j, "direction", index);
  if (dir == "request") r.direction = CaptureDirection::kRequest;
  else if (dir == "response") r.direction = CaptureDirection::kResponse;
  else throw bad(index, "unknown direction '" + dir + "'");
  r.url = field(j, "url", index);
  r.header_name = field(j, "headerName", index);
  if (r.header_name != header_for(r.direction)) {
    throw bad(index, dir + " records carry " + header_for(r.direction) + ", not '" + r.header_name + "'");
  }
  r.header_value = field(j, "headerValue", index);
  auto at = parse_rfc3339(field(j, "at", index));
  if (!at) throw bad(index, "'at' is not RFC 3339");
  r.at = *at;
  return r;
}

std::string serialize_capture_log(std::span<const CaptureRecord> records) {
  std::string out;
  for (const auto& r : records) out += capture_to_json(r).dump() + "\n";
  return out;
}

std::vector<CaptureRecord> parse_capture_log(std::string_view jsonl) {
  std::vector<CaptureRecord> out;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  for (std::size_t n = 0; std::getline(in, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw bad(n, e.what());
    }
    out.push_back(capture_from_json(j, n));
  }
  return out;
}

std::vector<CaptureRecord> capture_headers(CaptureDirection direction, const std::string& url,
                                           const std::vector<std::pair<std::string, std::string>>& headers,
                                           Timestamp at) {
  std::vector<CaptureRecord> out;
  const char* want = header_for(direction);
  for (const auto& [name, value] : headers) {
    if (iequals(name, want)) out.push_back({direction, url, want, value, at});
  }
  return out;
}

std::vector<CaptureRecord> capture_from_trace(std::span<const HttpExchange> trace) {
  std::vector<CaptureRecord> out;
  for (const auto& ex : trace) {
    if (!ex.cookie_header.empty()) {
      out.push_back({CaptureDirection::kRequest, ex.url, "Cookie", ex.cookie_header, ex.at});
    }
    for (const auto& sc : ex.set_cookies) {
      out.push_back({CaptureDirection::kResponse, ex.url, "Set-Cookie", sc, ex.at});
    }
  }
  return out;
}

}  // namespace se2fa
