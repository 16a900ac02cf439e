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

#include "se2fa/notification.h"

#include <array>

#include "se2fa/error.h"
#include "se2fa/time_util.h"

namespace se2fa {

std::string_view notification_name(NotificationType t) {
  static constexpr std::array<std::string_view, 6> kNames = {"N1", "N2", "N3",
                                                             "N4", "N5", "N6"};
  return kNames[static_cast<int>(t) - 1];
}

std::optional<NotificationType> notification_from_name(std::string_view name) {
  if (name.size() == 2 && name[0] == 'N' && name[1] >= '1' && name[1] <= '6') {
    return static_cast<NotificationType>(name[1] - '0');
  }
  return std::nullopt;
}

Json notification_to_json(const NotificationRecord& r) {
  Json j;
  j["account"] = r.account;
  j["kind"] = r.kind;
  j["at"] = format_rfc3339(r.at);
  j["detail"] = r.detail;
  j["metadata"] = Json::object();
  for (const auto& [k, v] : r.metadata) j["metadata"][k] = v;
  if (r.annotated) j["type"] = std::string(notification_name(*r.annotated));
  return j;
}

NotificationRecord notification_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kFormatError, "notification must be an object");
  NotificationRecord r;
  r.account = j.value("account", std::string{});
  r.kind = j.value("kind", std::string{});
  r.detail = j.value("detail", std::string{});
  if (auto it = j.find("at"); it != j.end() && it->is_string()) {
    if (auto t = parse_rfc3339(it->get<std::string>())) r.at = *t;
  }
  if (auto it = j.find("metadata"); it != j.end() && it->is_object()) {
    for (const auto& [k, v] : it->items()) {
      if (v.is_string()) r.metadata[k] = v.get<std::string>();
    }
  }
  if (auto it = j.find("type"); it != j.end() && it->is_string()) {
    r.annotated = notification_from_name(it->get<std::string>());
  }
  return r;
}

std::optional<NotificationType> classify_notification(const NotificationRecord& r) {
  if (r.annotated) return r.annotated;
  if (r.kind == "new-device") {
    bool has_time = r.metadata.count("time") > 0;
    bool has_location = r.metadata.count("location") > 0;
    return has_time && has_location ? NotificationType::kN2 : NotificationType::kN1;
  }
  if (r.kind == "abnormal-ip") return NotificationType::kN3;
  if (r.kind == "suspicious-login") return NotificationType::kN4;
  if (r.kind == "password-reset") return NotificationType::kN5;
  if (r.kind == "wrong-code") return NotificationType::kN6;
  return std::nullopt;
}

std::optional<NotificationType> classify_notifications(std::span<const NotificationRecord> log) {
  std::array<int, 7> counts{};
  for (const auto& r : log) {
    if (auto t = classify_notification(r)) ++counts[static_cast<int>(*t)];
  }
  int best = 0;
  for (int n = 1; n <= 6; ++n) {
    if (counts[n] > counts[best]) best = n;
  }
  if (counts[best] == 0) return std::nullopt;
  return static_cast<NotificationType>(best);
}

}  // namespace se2fa
