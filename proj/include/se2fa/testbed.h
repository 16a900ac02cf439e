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

#ifndef SE2FA_TESTBED_H_
#define SE2FA_TESTBED_H_

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "se2fa/attack_eval.h"
#include "se2fa/clock.h"
#include "se2fa/notification.h"

namespace httplib {
class Server;
}

namespace se2fa {

enum class RememberPlacement { kAtChallenge, kInSettings, kRememberMe, kNone };

std::string_view placement_name(RememberPlacement p);

enum class ValueScheme {
  kRandom128,
  kFixedPerAccount,
  kGlobalShared,
  kTimestampSeconds,
  kTimestampMillis,
  kBase64Profile,
};

std::string_view scheme_name(ValueScheme s);

struct TrustCookieSpec {
  std::string name;
  ValueScheme scheme = ValueScheme::kRandom128;
  bool secure = true;
  bool http_only = true;
  std::optional<std::int64_t> max_age_seconds;  // nullopt: Session
};

struct AccountSpec {
  std::string username;
  std::string password_hash;  // "sha256:<hex>"
  std::string totp_seed;      // base32
};

std::string hash_password(std::string_view password);

struct TargetConfig {
  std::string id;
  MeasureSet risk_controls;
  RememberPlacement placement = RememberPlacement::kAtChallenge;
  std::vector<TrustCookieSpec> trust_cookies;
  int decoy_cookies = 0;
  bool broken2fa = false;
  std::optional<NotificationType> notification;
  std::vector<AccountSpec> accounts;
  // Test-only flakiness: every n-th password login skips the prompt.
  int skip_prompt_every = 0;

  // Throws Error(kInvalidConfig).
  void validate() const;
};

TargetConfig target_config_from_json(const Json& j);
Json target_config_to_json(const TargetConfig& c);
std::vector<TargetConfig> load_matrix(const std::string& path);

// What a correct evaluator should conclude about a config.
struct GroundTruth {
  std::string id;
  bool remember_device = false;
  MeasureSet measures;
  std::vector<std::string> trust_cookie_names;
  std::set<FlawKind> flaws;
  std::set<AttackType> attacks;
  std::optional<NotificationType> notification;
};

GroundTruth ground_truth(const TargetConfig& c);
Json ground_truth_to_json(const GroundTruth& g);
GroundTruth ground_truth_from_json(const Json& j);

struct LoginContext {
  std::map<std::string, std::string> cookies;
  std::string fingerprint;
  std::string ip;
  std::string device_token;
};

struct TrustDecision {
  bool trusted = false;
  std::vector<std::string> reasons;  // failed factors
};

struct SecondFactorOutcome {
  enum class Status { kOk, kBadCode, kReplayedCode, kNoPendingLogin } status = Status::kOk;
  std::vector<std::string> set_cookies;
  std::optional<std::string> device_token;
};

// Protocol logic of one mock service, independent of HTTP. Thread-safe.
class TestbedState {
 public:
  TestbedState(TargetConfig config, std::shared_ptr<const Clock> clock);

  const TargetConfig& config() const { return config_; }

  struct LoginOutcome {
    enum class Status { kOk, kBadCredentials } status = Status::kOk;
    bool requires2fa = false;
    std::vector<std::string> set_cookies;
  };
  LoginOutcome login(const std::string& username, const std::string& password,
                     const LoginContext& ctx);
  SecondFactorOutcome verify_second_factor(const LoginContext& ctx, const std::string& code,
                                           bool remember_device);
  // 200, 401 (not signed in) or 404 (placement elsewhere).
  int trust_device(const LoginContext& ctx, std::vector<std::string>& set_cookies,
                   std::optional<std::string>& device_token);
  std::optional<std::string> account_for(const LoginContext& ctx) const;
  std::vector<std::string> logout(const LoginContext& ctx);

  TrustDecision evaluate_trust(const std::string& account, const LoginContext& ctx) const;

  std::vector<NotificationRecord> notifications(const std::string& account) const;
  void reset();

 private:
  struct Account {
    AccountSpec spec;
    Bytes seed;
    std::set<std::uint64_t> used_counters;
    std::map<std::string, std::map<std::string, std::optional<Timestamp>>> issued;
    std::set<std::string> trusted_fingerprints, trusted_ips, device_tokens;
    std::set<std::pair<std::string, std::string>> known_devices;
    std::set<std::string> known_ips;
    int password_logins = 0;
  };
  struct Session {
    std::string account;
    bool authenticated = false;
    bool pre_trusted = false;
  };

  TrustDecision evaluate_trust_locked(const Account& a, const LoginContext& ctx) const;
  std::string trust_value(const TrustCookieSpec& spec, const Account& a, const LoginContext& ctx,
                          const std::string& code) const;
  bool trust_value_valid(const TrustCookieSpec& spec, const Account& a,
                         const std::string& value) const;
  void issue_trust(Account& a, const LoginContext& ctx, const std::string& code,
                   std::vector<std::string>& set_cookies, std::optional<std::string>& token);
  void complete_login(Account& a, const Session& s, const LoginContext& ctx);
  std::string new_session(Session s);
  Session* session_for(const LoginContext& ctx);
  const Session* session_for(const LoginContext& ctx) const;

  TargetConfig config_;
  std::shared_ptr<const Clock> clock_;
  Bytes service_secret_;
  mutable std::mutex mu_;
  std::map<std::string, Account> accounts_;
  std::map<std::string, Session> sessions_;
  std::vector<NotificationRecord> log_;
};

struct ServiceOptions {
  bool expose_truth = false;
  std::optional<std::string> tls_cert;
  std::optional<std::string> tls_key;
};

// One mock service on one port. Port 0 picks a free port.
class TestbedService {
 public:
  TestbedService(TargetConfig config, std::shared_ptr<const Clock> clock,
                 ServiceOptions options = {});
  ~TestbedService();
  TestbedService(const TestbedService&) = delete;
  TestbedService& operator=(const TestbedService&) = delete;

  // Throws Error(kPortInUse).
  void start(const std::string& host, int port);
  void stop();
  int port() const { return port_; }
  std::string base_url() const;
  TestbedState& state() { return *state_; }

 private:
  void install_routes();

  std::unique_ptr<TestbedState> state_;
  ServiceOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_ = "127.0.0.1";
  int port_ = 0;
};

// Serves every config of a matrix on consecutive ports from base_port
// (or free ports when base_port is 0).
class TestbedFleet {
 public:
  TestbedFleet(const std::vector<TargetConfig>& configs, std::shared_ptr<const Clock> clock,
               ServiceOptions options = {});
  void start(const std::string& host, int base_port);
  void stop();
  std::size_t size() const { return services_.size(); }
  TestbedService& at(std::size_t i) { return *services_.at(i); }

 private:
  std::vector<std::unique_ptr<TestbedService>> services_;
};

}  // namespace se2fa

#endif  // SE2FA_TESTBED_H_
