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

#ifndef SE2FA_EVALUATOR_H_
#define SE2FA_EVALUATOR_H_

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "se2fa/attack_eval.h"
#include "se2fa/notification.h"
#include "se2fa/risk_probe.h"

namespace se2fa {

struct EvaluationVerdict {
  std::string target;
  bool remember_device = false;
  MeasureSet measures;
  TrustCookieSet trust;
  TrustCookieAudit audit;
  std::set<AttackType> attacks;
  std::optional<NotificationType> notification;
  // False when nobody looked; `notification` is then meaningless.
  bool notification_probed = false;
  std::vector<std::string> notes;
};

Json verdict_to_json(const EvaluationVerdict& v);
EvaluationVerdict verdict_from_json(const Json& j);

struct EvaluateOptions {
  // Second account for the cross-account and value-scheme tests.
  std::optional<Credentials> second_account;
  bool probe_notifications = true;
  int broken_check_logins = 3;
};

// The full procedure against one target: broken-2FA check, remember-device,
// risk-control attribution, trust-cookie isolation, flaw battery and
// notification probe. Each stage runs as its own reset trial.
EvaluationVerdict evaluate_target(const Target& target, const Credentials& account,
                                  std::shared_ptr<const Clock> clock,
                                  const EvaluateOptions& options = {},
                                  EnvFactory envs = default_env_factory());

}  // namespace se2fa

#endif  // SE2FA_EVALUATOR_H_
