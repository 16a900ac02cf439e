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

#ifndef SE2FA_ATTACK_EVAL_H_
#define SE2FA_ATTACK_EVAL_H_

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "se2fa/risk_probe.h"

namespace se2fa {

enum class AttackType { kA1 = 1, kA2, kA3, kA4 };

std::string_view attack_name(AttackType a);
std::optional<AttackType> attack_from_name(std::string_view name);

enum class FlawKind {
  kCrossAccountReuse,
  kFixedValue,
  kPredictableTimestamp,
  kSensitiveEncoding,
  kBroken2fa,
};

std::string_view flaw_name(FlawKind f);
std::optional<FlawKind> flaw_from_name(std::string_view name);

// Where a timestamp sits inside a cookie value, so a forged one can be
// rendered the same way.
struct TimestampPattern {
  std::string prefix;
  std::string suffix;
  bool millis = false;
};

struct DesignFlaw {
  FlawKind kind;
  std::string evidence;
  std::optional<CookieKey> cookie;
  std::optional<std::string> observed_value;
  std::optional<TimestampPattern> timestamp;
};

struct CookieAudit {
  CookieKey key;
  bool secure = false;
  bool http_only = false;
  std::optional<int> lifetime_days;  // nullopt: Session
};

struct TrustCookieAudit {
  bool cookie_only = false;
  bool uses_local_storage = false;
  std::vector<CookieAudit> per_cookie;
  std::vector<DesignFlaw> flaws;
  std::vector<std::string> warnings;

  bool has_flaw(FlawKind k) const;
  std::set<FlawKind> flaw_kinds() const;
};

Json audit_to_json(const TrustCookieAudit& a);
TrustCookieAudit audit_from_json(const Json& j);

// ceil((expires - created) / 1 day); nullopt for Session cookies.
std::optional<int> lifetime_days(const CookieRecord& r);

TrustCookieAudit build_audit(const MeasureSet& measures, const TrustCookieSet& trust,
                             std::vector<DesignFlaw> flaws = {},
                             std::vector<std::string> warnings = {});

// Broken2FA gives {A4}. Otherwise A3, plus A1 when no trust cookie is
// Secure, A2 when none is HttpOnly or the token lives in localStorage, A4
// when any flaw was found. Throws Error(kEmptyAudit) with nothing to judge.
std::set<AttackType> classify_attack_surface(const TrustCookieAudit& audit);

// True iff account B's trust cookies, imported into a fresh attacker
// environment, suppress the prompt for account A.
bool test_cross_account_reuse(RiskProbe& probe, const Credentials& account_a,
                              const TrustCookieSet& trust_b, const SessionEnv& attacker_env);

struct ValueAnalysis {
  std::vector<DesignFlaw> flaws;
  std::vector<std::string> warnings;
  std::set<FlawKind> kinds() const;
};

// sets: victim, victim, attacker, attacker. Throws Error(kInsufficientSets).
ValueAnalysis analyze_value_scheme(std::span<const TrustCookieSet> sets,
                                   std::span<const Timestamp> login_times);

// Shannon entropy in bits per character.
double shannon_entropy(std::string_view value);

// Finds an epoch seconds/millis value (whole, or a delimited all-digit
// component) within +-7 days of `near`.
std::optional<TimestampPattern> find_timestamp(std::string_view value, Timestamp near);

// Decoded payload if `value` is Base64 of >=90% printable text that holds an
// IPv4 address, an ISO date or a 6-digit code.
std::optional<std::string> sensitive_base64_payload(std::string_view value);

// Throws Error(kUnforgeable) for flaws that give no way to mint a value.
CookieRecord forge_cookie_value(const DesignFlaw& flaw, const CookieRecord& templ, TimePoint now);

// Zero prompts over >= 3 fresh logins. Intermittent prompting is not broken;
// it is reported through `notes`.
bool detect_broken_2fa(std::span<const FlowResult> logins, std::vector<std::string>* notes = nullptr);

enum class ExpiryBucket { kUpTo7, k8To29, k30, k31To364, k365Plus, kSession };

std::string_view bucket_name(ExpiryBucket b);
ExpiryBucket bucket_for_days(int days);

struct ExpiryAudit {
  std::optional<int> max_lifetime_days;
  ExpiryBucket bucket = ExpiryBucket::kSession;
};

ExpiryAudit audit_expiry(const TrustCookieSet& trust);
ExpiryAudit audit_expiry(const TrustCookieAudit& audit);

}  // namespace se2fa

#endif  // SE2FA_ATTACK_EVAL_H_
