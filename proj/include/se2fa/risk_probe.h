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

#ifndef SE2FA_RISK_PROBE_H_
#define SE2FA_RISK_PROBE_H_

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "se2fa/flow.h"

namespace se2fa {

struct MeasureSet {
  bool cookie_based = false;
  bool fingerprint_based = false;
  bool ip_based = false;
  bool device_token_based = false;

  bool cookie_only() const {
    return cookie_based && !fingerprint_based && !ip_based && !device_token_based;
  }
  bool any() const { return cookie_based || fingerprint_based || ip_based || device_token_based; }
  friend bool operator==(const MeasureSet&, const MeasureSet&) = default;
};

Json measures_to_json(const MeasureSet& m);
MeasureSet measures_from_json(const Json& j);

struct TrustCookieSet {
  std::set<CookieKey> keys;
  std::vector<CookieRecord> records;

  bool empty() const { return keys.empty(); }
  std::vector<std::string> names() const;
};

Json trust_to_json(const TrustCookieSet& t);
TrustCookieSet trust_from_json(const Json& j);

enum class EnvRole { kVictim, kAttacker };

// Builds fresh simulated devices. The default puts the victim and the
// attacker on different fingerprints and IPs.
using EnvFactory = std::function<SessionEnv(EnvRole)>;
EnvFactory default_env_factory();

enum class RememberRoute { kAtChallenge, kInSettings };

struct BypassReport {
  bool verification = false;  // first login skipped the prompt
  bool confirmation = false;  // a second login after logout did too
  bool authenticated = false; // account page reachable afterwards
  bool ok() const { return verification && confirmation && authenticated; }
};

// Runs the detection procedures against one target. Every public probe
// begins with a trial reset when the target offers the hook.
class RiskProbe {
 public:
  RiskProbe(Target target, std::shared_ptr<const Clock> clock,
            EnvFactory envs = default_env_factory());

  void begin_trial();

  bool probe_remember_device(const Credentials& account);
  bool probe_cookie_based(const Credentials& account);

  // `victim_env` must have completed a remember flow. Throws
  // Error(kInconclusive).
  MeasureSet probe_additional_measures(const Credentials& account, const SessionEnv& victim_env,
                                       const SessionEnv& attacker_env);

  // Runs its own remember flow in `victim_env` (which should be fresh);
  // bypass attempts start from `attacker_env`. Throws
  // Error(kIsolationFailed).
  TrustCookieSet isolate_trust_cookies(const Credentials& account, SessionEnv& victim_env,
                                       const SessionEnv& attacker_env);

  bool verify_bypass(const Credentials& account, const TrustCookieSet& trust,
                     const SessionEnv& attacker_env);
  BypassReport verify_bypass_detailed(const Credentials& account, const TrustCookieSet& trust,
                                      const SessionEnv& attacker_env);

  // Login, Solve2FA(remember) (plus the settings toggle on that route).
  // Pre/post snapshots are labelled "pre" and "post".
  FlowResult run_remember_flow(const Credentials& account, SessionEnv& env);

  // Copies the factors enabled in `m` (other than cookies) from victim to
  // attacker.
  SessionEnv equalize(const SessionEnv& attacker, const SessionEnv& victim,
                      const MeasureSet& m) const;

  RememberRoute route() const { return route_; }
  void set_route(RememberRoute r) { route_ = r; }
  SessionEnv make_env(EnvRole role) const { return envs_(role); }
  const FlowDriver& driver() const { return driver_; }
  const Target& target() const { return driver_.target(); }

 private:
  bool login_prompts(const Credentials& account, SessionEnv& env);

  FlowDriver driver_;
  EnvFactory envs_;
  RememberRoute route_ = RememberRoute::kAtChallenge;
};

}  // namespace se2fa

#endif  // SE2FA_RISK_PROBE_H_
