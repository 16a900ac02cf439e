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

#ifndef SE2FA_FLOW_H_
#define SE2FA_FLOW_H_

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "se2fa/clock.h"
#include "se2fa/cookie.h"
#include "se2fa/cookie_jar.h"
#include "se2fa/encoding.h"
#include "se2fa/notification.h"

namespace se2fa {

// Test account on a target. The seed is the raw shared secret; on disk it
// is base32 (`totpSeed`), as authenticator apps expect.
struct Credentials {
  std::string username;
  std::string password;
  Bytes totp_seed;
  int digits = 6;
  std::chrono::seconds step{30};
};

Credentials credentials_from_json(const Json& j);
Credentials load_credentials(const std::string& path);

// A simulated browser on a simulated device. Fingerprint, IP and device
// token reach the server as X-Device-Fingerprint, X-Forwarded-For and
// X-Device-Token.
struct SessionEnv {
  CookieJar jar;
  std::string fingerprint;
  std::string simulated_ip;
  // target id -> token (localStorage stand-in)
  std::map<std::string, std::string> device_token_store;
  // Whether Secure cookies are transmitted; simulates an HTTPS origin.
  bool secure_context = true;
};

// Decides "did this login response ask for a second factor" on targets that
// do not speak the testbed protocol. Patterns are ECMAScript regexes
// matched against the response body.
struct ChallengeMatcher {
  std::vector<std::string> positive;
  std::vector<std::string> negative;
  std::vector<int> positive_status;
};

struct TargetProfile {
  std::string login_path = "/login";
  std::string challenge_path = "/2fa";
  std::string logout_path = "/logout";
  std::string account_path = "/account";
  std::string trust_device_path = "/settings/trust-device";
  std::optional<ChallengeMatcher> challenge_matcher;
};

TargetProfile target_profile_from_json(const Json& j);
TargetProfile load_target_profile(const std::string& path);

struct HttpResponse {
  int status = 0;
  std::string body;
  std::vector<std::string> set_cookies;
};

// Testbed protocol: the JSON field `requires2fa`. With a matcher, positive
// and negative patterns decide. Throws Error(kAmbiguousPrompt) when both or
// neither side matches (or the testbed marker is missing).
bool detect_2fa_prompt(const HttpResponse& response, const ChallengeMatcher* matcher = nullptr);

struct HttpExchange {
  std::string method;
  std::string path;
  std::string url;  // origin plus path, after redirects
  Timestamp at{};
  // Cookie names attached to the request, and the header as sent.
  std::vector<std::string> sent_cookies;
  std::string cookie_header;
  int status = 0;
  std::vector<std::string> set_cookies;
  std::string body;
};

// An HTTP(S) endpoint under evaluation. Copyable and stateless apart from
// configuration; all browser state lives in SessionEnv.
class Target {
 public:
  explicit Target(std::string base_url, TargetProfile profile = {});

  const std::string& base_url() const { return base_url_; }
  const std::string& id() const { return base_url_; }
  const std::string& host() const { return host_; }
  const TargetProfile& profile() const { return profile_; }
  void set_verify_tls(bool verify) { verify_tls_ = verify; }

  // Sends one request from `env`, attaching and absorbing cookies and
  // following up to 10 redirects. Throws Error(kTargetUnreachable).
  HttpResponse send(const std::string& method, const std::string& path, const Json* body,
                    SessionEnv& env, Timestamp now,
                    std::vector<HttpExchange>* trace = nullptr) const;

  // Test hooks. reset() returns false when the target has no reset hook.
  bool reset() const;
  std::vector<NotificationRecord> notifications(const std::string& account) const;

 private:
  std::string base_url_;
  std::string scheme_;
  std::string host_;
  int port_ = 0;
  TargetProfile profile_;
  bool verify_tls_ = true;
};

struct LoginStep {
  std::string username;  // empty: use the account passed to execute()
  std::string password;
};
struct Solve2faStep {
  bool remember_device = false;
};
struct LogoutStep {};
struct ClearAllStep {};
struct SnapshotStep {
  std::string label;
};
struct ImportCookiesStep {
  CookieSnapshot snapshot;
};
struct ToggleMaskStep {
  std::set<CookieKey> enabled;
};
struct AssertPromptStep {
  bool expected = true;
};
// Marks the current device trusted from account settings, for services
// that place the option there instead of on the challenge page.
struct TrustDeviceStep {};

using FlowStep = std::variant<LoginStep, Solve2faStep, LogoutStep, ClearAllStep, SnapshotStep,
                              ImportCookiesStep, ToggleMaskStep, AssertPromptStep,
                              TrustDeviceStep>;

struct FlowScript {
  std::vector<FlowStep> steps;

  // Throws Error(kScriptInvalid, step) when Solve2FA, AssertPrompt or
  // TrustDevice precede any Login, or a snapshot label repeats.
  void validate() const;
};

FlowScript flow_script_from_json(const Json& j);
Json flow_script_to_json(const FlowScript& script);
FlowScript load_flow_script(const std::string& path);

struct PromptObservation {
  std::size_t step_index = 0;
  bool prompted = false;
};

struct FlowResult {
  std::map<std::string, CookieSnapshot> snapshots;
  std::vector<PromptObservation> prompts;
  bool final_authenticated = false;
  std::vector<HttpExchange> http_trace;
  // Clock reading at each Login step.
  std::vector<TimePoint> login_times;
};

Json flow_result_to_json(const FlowResult& r);

class FlowDriver {
 public:
  FlowDriver(Target target, std::shared_ptr<const Clock> clock);

  // Runs `script` in `env`. Errors: kScriptInvalid, kTargetUnreachable,
  // kAuthFailed(step), kChallengeFailed(step), kAssertionFailed(step),
  // kUnknownKey from a toggle mask.
  FlowResult execute(const FlowScript& script, SessionEnv& env, const Credentials& account) const;

  const Target& target() const { return target_; }
  const Clock& clock() const { return *clock_; }

 private:
  Target target_;
  std::shared_ptr<const Clock> clock_;
};

}  // namespace se2fa

#endif  // SE2FA_FLOW_H_
