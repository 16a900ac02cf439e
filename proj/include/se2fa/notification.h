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

#ifndef SE2FA_NOTIFICATION_H_
#define SE2FA_NOTIFICATION_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "se2fa/clock.h"
#include "se2fa/cookie.h"

namespace se2fa {

// Alert behaviors on a login from an unrecognized device:
//   N1 new-device alert only          N4 suspicious-login verification
//   N2 new-device with time+location  N5 alert plus automatic password reset
//   N3 abnormal-IP alert              N6 wrong 2FA code after correct password
enum class NotificationType { kN1 = 1, kN2, kN3, kN4, kN5, kN6 };

std::string_view notification_name(NotificationType t);
std::optional<NotificationType> notification_from_name(std::string_view name);

// One alert as observed in the victim's mailbox. `kind` is the alert's
// subject class ("new-device", "abnormal-ip", "suspicious-login",
// "password-reset", "wrong-code"); `metadata` holds whatever the alert
// disclosed (time, location, ip). `annotated` is an analyst-assigned type
// and overrides the kind-based mapping.
struct NotificationRecord {
  std::string account;
  std::string kind;
  Timestamp at{};
  std::string detail;
  std::map<std::string, std::string> metadata;
  std::optional<NotificationType> annotated;

  friend bool operator==(const NotificationRecord&, const NotificationRecord&) = default;
};

Json notification_to_json(const NotificationRecord& r);
NotificationRecord notification_from_json(const Json& j);

// Maps one record to its type; nullopt for an unrecognized kind.
std::optional<NotificationType> classify_notification(const NotificationRecord& r);

// Type of a log: the most frequent record type (ties go to the lower N).
// An empty log, or one with no recognizable records, yields nullopt.
std::optional<NotificationType> classify_notifications(std::span<const NotificationRecord> log);

}  // namespace se2fa

#endif  // SE2FA_NOTIFICATION_H_
