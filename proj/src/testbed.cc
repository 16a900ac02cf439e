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

#include "se2fa/testbed.h"

#include <fstream>

#include <httplib.h>

#include "se2fa/encoding.h"
#include "se2fa/error.h"
#include "se2fa/time_util.h"
#include "se2fa/totp.h"

namespace se2fa {
namespace {

constexpr std::array<const char*, 6> kDecoyNames = {"_ga_sim", "pref_lang", "csrftoken",
                                                    "_trk",    "ab_bucket", "consent"};
constexpr std::chrono::seconds kSessionTrustWindow = std::chrono::hours(24 * 30);

const std::array<std::pair<RememberPlacement, std::string_view>, 4> kPlacements = {{
    {RememberPlacement::kAtChallenge, "AtChallenge"},
    {RememberPlacement::kInSettings, "InSettings"},
    {RememberPlacement::kRememberMe, "RememberMe"},
    {RememberPlacement::kNone, "None"},
}};

const std::array<std::pair<ValueScheme, std::string_view>, 6> kSchemes = {{
    {ValueScheme::kRandom128, "Random128"},
    {ValueScheme::kFixedPerAccount, "FixedPerAccount"},
    {ValueScheme::kGlobalShared, "GlobalShared"},
    {ValueScheme::kTimestampSeconds, "TimestampSeconds"},
    {ValueScheme::kTimestampMillis, "TimestampMillis"},
    {ValueScheme::kBase64Profile, "Base64Profile"},
}};

template <typename E, std::size_t N>
E enum_from(const std::array<std::pair<E, std::string_view>, N>& table, const std::string& name,
            const char* what) {
  for (const auto& [e, n] : table) {
    if (n == name) return e;
  }
  throw Error(ErrorCode::kInvalidConfig, std::string("unknown ") + what + " " + name);
}

std::string set_cookie_header(const std::string& name, const std::string& value,
                              bool secure, bool http_only, std::optional<std::int64_t> max_age) {
  std::string h = name + "=" + value + "; Path=/";
  if (max_age) h += "; Max-Age=" + std::to_string(*max_age);
  if (secure) h += "; Secure";
  if (http_only) h += "; HttpOnly";
  h += "; SameSite=Lax";
  return h;
}

std::set<FlawKind> scheme_flaws(ValueScheme s) {
  switch (s) {
    case ValueScheme::kRandom128: return {};
    case ValueScheme::kFixedPerAccount: return {FlawKind::kFixedValue};
    case ValueScheme::kGlobalShared: return {FlawKind::kFixedValue, FlawKind::kCrossAccountReuse};
    case ValueScheme::kTimestampSeconds:
    case ValueScheme::kTimestampMillis:
      // Any fresh timestamp passes the check, whoever minted it.
      return {FlawKind::kPredictableTimestamp, FlawKind::kCrossAccountReuse};
    case ValueScheme::kBase64Profile: return {FlawKind::kSensitiveEncoding};
  }
  return {};
}

std::optional<std::int64_t> parse_int(const std::string& s) {
  if (s.empty() || s.size() > 18) return std::nullopt;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
  }
  return std::stoll(s);
}

}  // namespace

std::string_view placement_name(RememberPlacement p) {
  for (const auto& [e, n] : kPlacements) {
    if (e == p) return n;
  }
  return "?";
}

std::string_view scheme_name(ValueScheme s) {
  for (const auto& [e, n] : kSchemes) {
    if (e == s) return n;
  }
  return "?";
}

std::string hash_password(std::string_view password) { return "sha256:" + sha256_hex(password); }

void TargetConfig::validate() const {
  auto fail = [&](const std::string& m) { throw Error(ErrorCode::kInvalidConfig, id + ": " + m); };
  if (id.empty()) throw Error(ErrorCode::kInvalidConfig, "config id is empty");
  if (accounts.empty()) fail("no accounts");
  std::set<std::string> names;
  for (const auto& a : accounts) {
    if (a.username.empty()) fail("empty username");
    if (!names.insert(a.username).second) fail("duplicate account " + a.username);
    if (a.password_hash.rfind("sha256:", 0) != 0) fail("password hash must be sha256:<hex>");
    auto seed = base32_decode(a.totp_seed);
    if (!seed) fail("totpSeed of " + a.username + " is not base32");
    if (seed->size() < 16) fail("totpSeed of " + a.username + " is shorter than 16 bytes");
  }
  if (broken2fa && !trust_cookies.empty()) fail("broken2fa targets issue no trust cookies");
  if (risk_controls.cookie_based && !broken2fa && placement != RememberPlacement::kNone &&
      trust_cookies.empty()) {
    fail("cookie-based trust needs at least one trust cookie");
  }
  if (!broken2fa && placement != RememberPlacement::kNone && !risk_controls.any()) {
    fail("remember-device without any risk control");
  }
  if (decoy_cookies < 0 || decoy_cookies > static_cast<int>(kDecoyNames.size())) {
    fail("decoyCookies must be 0..6");
  }
  std::set<std::string> cookie_names{"sid"};
  for (int i = 0; i < decoy_cookies; ++i) cookie_names.insert(kDecoyNames[i]);
  for (const auto& t : trust_cookies) {
    if (!is_valid_cookie_name(t.name)) fail("invalid cookie name " + t.name);
    if (!cookie_names.insert(t.name).second) fail("cookie name clash " + t.name);
    if (t.max_age_seconds && *t.max_age_seconds <= 0) fail("maxAgeSeconds must be positive");
  }
  if (skip_prompt_every < 0) fail("skipPromptEvery must be >= 0");
}

TargetConfig target_config_from_json(const Json& j) {
  TargetConfig c;
  try {
    c.id = j.at("id").get<std::string>();
    c.risk_controls = measures_from_json(j.at("riskControls"));
    c.placement = enum_from(kPlacements, j.value("rememberPlacement", "AtChallenge"), "placement");
    for (const auto& t : j.value("trustCookies", Json::array())) {
      TrustCookieSpec s;
      s.name = t.at("name").get<std::string>();
      s.scheme = enum_from(kSchemes, t.at("valueScheme").get<std::string>(), "value scheme");
      s.secure = t.at("secure").get<bool>();
      s.http_only = t.at("httpOnly").get<bool>();
      if (t.contains("maxAgeSeconds") && !t["maxAgeSeconds"].is_null()) {
        s.max_age_seconds = t["maxAgeSeconds"].get<std::int64_t>();
      }
      c.trust_cookies.push_back(std::move(s));
    }
    c.decoy_cookies = j.value("decoyCookies", 0);
    c.broken2fa = j.value("broken2fa", false);
    if (j.contains("notification") && !j["notification"].is_null()) {
      auto n = notification_from_name(j["notification"].get<std::string>());
      if (!n) throw Error(ErrorCode::kInvalidConfig, "unknown notification type");
      c.notification = n;
    }
    c.skip_prompt_every = j.value("skipPromptEvery", 0);
    for (const auto& a : j.at("accounts")) {
      c.accounts.push_back({a.at("username").get<std::string>(),
                            a.at("passwordHash").get<std::string>(),
                            a.at("totpSeed").get<std::string>()});
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("target config: ") + e.what());
  }
  c.validate();
  return c;
}

Json target_config_to_json(const TargetConfig& c) {
  Json trust = Json::array();
  for (const auto& t : c.trust_cookies) {
    trust.push_back({{"name", t.name},
                     {"valueScheme", scheme_name(t.scheme)},
                     {"secure", t.secure},
                     {"httpOnly", t.http_only},
                     {"maxAgeSeconds", t.max_age_seconds ? Json(*t.max_age_seconds) : Json(nullptr)}});
  }
  Json accounts = Json::array();
  for (const auto& a : c.accounts) {
    accounts.push_back({{"username", a.username}, {"passwordHash", a.password_hash},
                        {"totpSeed", a.totp_seed}});
  }
  Json j{{"id", c.id},
         {"riskControls", measures_to_json(c.risk_controls)},
         {"rememberPlacement", placement_name(c.placement)},
         {"trustCookies", trust},
         {"decoyCookies", c.decoy_cookies},
         {"broken2fa", c.broken2fa},
         {"notification", c.notification ? Json(notification_name(*c.notification)) : Json(nullptr)},
         {"accounts", accounts}};
  if (c.skip_prompt_every) j["skipPromptEvery"] = c.skip_prompt_every;
  return j;
}

std::vector<TargetConfig> load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidConfig, "cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, path + ": " + e.what());
  }
  const Json& list = j.is_array() ? j : j.at("targets");
  std::vector<TargetConfig> out;
  std::set<std::string> ids;
  for (const auto& t : list) {
    out.push_back(target_config_from_json(t));
    if (!ids.insert(out.back().id).second) {
      throw Error(ErrorCode::kInvalidConfig, "duplicate target id " + out.back().id);
    }
  }
  return out;
}

GroundTruth ground_truth(const TargetConfig& c) {
  GroundTruth g;
  g.id = c.id;
  g.notification = c.notification;
  if (c.broken2fa) {
    g.flaws = {FlawKind::kBroken2fa};
    g.attacks = {AttackType::kA4};
    return g;
  }
  if (c.placement == RememberPlacement::kNone) return g;
  g.remember_device = true;
  g.measures = c.risk_controls;
  if (g.measures.cookie_based) {
    for (const auto& t : c.trust_cookies) g.trust_cookie_names.push_back(t.name);
    std::sort(g.trust_cookie_names.begin(), g.trust_cookie_names.end());
  }
  if (g.measures.cookie_only()) {
    for (const auto& t : c.trust_cookies) {
      auto f = scheme_flaws(t.scheme);
      g.flaws.insert(f.begin(), f.end());
    }
  }
  bool client_storage_only = !g.measures.fingerprint_based && !g.measures.ip_based;
  if (client_storage_only) {
    TrustCookieAudit audit;
    audit.cookie_only = g.measures.cookie_only();
    audit.uses_local_storage = g.measures.device_token_based;
    if (g.measures.cookie_based) {
      for (const auto& t : c.trust_cookies) {
        std::optional<int> days;
        if (t.max_age_seconds) days = static_cast<int>((*t.max_age_seconds + 86399) / 86400);
        audit.per_cookie.push_back({CookieKey{t.name, "", "/"}, t.secure, t.http_only, days});
      }
    }
    for (auto f : g.flaws) audit.flaws.push_back({f, "planted", {}, {}, {}});
    g.attacks = classify_attack_surface(audit);
  }
  return g;
}

Json ground_truth_to_json(const GroundTruth& g) {
  Json flaws = Json::array();
  for (auto f : g.flaws) flaws.push_back(flaw_name(f));
  Json attacks = Json::array();
  for (auto a : g.attacks) attacks.push_back(attack_name(a));
  return Json{{"id", g.id},
              {"rememberDevice", g.remember_device},
              {"measures", measures_to_json(g.measures)},
              {"trustCookies", g.trust_cookie_names},
              {"flaws", flaws},
              {"attacks", attacks},
              {"notification",
               g.notification ? Json(notification_name(*g.notification)) : Json(nullptr)}};
}

GroundTruth ground_truth_from_json(const Json& j) {
  GroundTruth g;
  g.id = j.at("id").get<std::string>();
  g.remember_device = j.at("rememberDevice").get<bool>();
  g.measures = measures_from_json(j.at("measures"));
  g.trust_cookie_names = j.at("trustCookies").get<std::vector<std::string>>();
  for (const auto& f : j.at("flaws")) g.flaws.insert(*flaw_from_name(f.get<std::string>()));
  for (const auto& a : j.at("attacks")) g.attacks.insert(*attack_from_name(a.get<std::string>()));
  if (!j.at("notification").is_null()) {
    g.notification = notification_from_name(j["notification"].get<std::string>());
  }
  return g;
}

TestbedState::TestbedState(TargetConfig config, std::shared_ptr<const Clock> clock)
    : config_(std::move(config)), clock_(std::move(clock)), service_secret_(random_bytes(32)) {
  config_.validate();
  reset();
}

void TestbedState::reset() {
  std::lock_guard lock(mu_);
  accounts_.clear();
  for (const auto& spec : config_.accounts) {
    Account a;
    a.spec = spec;
    a.seed = *base32_decode(spec.totp_seed);
    accounts_.emplace(spec.username, std::move(a));
  }
  sessions_.clear();
  log_.clear();
}

std::string TestbedState::new_session(Session s) {
  std::string sid = random_hex(16);
  sessions_[sid] = std::move(s);
  return sid;
}

TestbedState::Session* TestbedState::session_for(const LoginContext& ctx) {
  auto it = ctx.cookies.find("sid");
  if (it == ctx.cookies.end()) return nullptr;
  auto s = sessions_.find(it->second);
  return s == sessions_.end() ? nullptr : &s->second;
}

const TestbedState::Session* TestbedState::session_for(const LoginContext& ctx) const {
  return const_cast<TestbedState*>(this)->session_for(ctx);
}

std::string TestbedState::trust_value(const TrustCookieSpec& spec, const Account& a,
                                      const LoginContext& ctx, const std::string& code) const {
  auto now = clock_->now();
  switch (spec.scheme) {
    case ValueScheme::kRandom128:
      return random_hex(16);
    case ValueScheme::kFixedPerAccount:
      return hex_encode(hmac_sha256(service_secret_, to_bytes(a.spec.username + ":" + spec.name)))
          .substr(0, 32);
    case ValueScheme::kGlobalShared:
      return hex_encode(hmac_sha256(service_secret_, to_bytes("global:" + spec.name))).substr(0, 32);
    case ValueScheme::kTimestampSeconds:
      return std::to_string(to_timestamp(now).time_since_epoch().count());
    case ValueScheme::kTimestampMillis:
      return std::to_string(now.time_since_epoch().count());
    case ValueScheme::kBase64Profile: {
      Json p{{"ip", ctx.ip}, {"date", format_iso_date(to_timestamp(now))}, {"otp", code}};
      return base64_encode(to_bytes(p.dump()));
    }
  }
  return {};
}

bool TestbedState::trust_value_valid(const TrustCookieSpec& spec, const Account& a,
                                     const std::string& value) const {
  Timestamp now = clock_->now_seconds();
  switch (spec.scheme) {
    case ValueScheme::kRandom128:
    case ValueScheme::kBase64Profile: {
      auto by_name = a.issued.find(spec.name);
      if (by_name == a.issued.end()) return false;
      auto it = by_name->second.find(value);
      return it != by_name->second.end() && (!it->second || *it->second > now);
    }
    case ValueScheme::kFixedPerAccount:
    case ValueScheme::kGlobalShared:
      return value == trust_value(spec, a, {}, {});
    case ValueScheme::kTimestampSeconds:
    case ValueScheme::kTimestampMillis: {
      auto v = parse_int(value);
      if (!v) return false;
      std::int64_t secs = spec.scheme == ValueScheme::kTimestampMillis ? *v / 1000 : *v;
      std::int64_t age = now.time_since_epoch().count() - secs;
      std::int64_t window = spec.max_age_seconds.value_or(kSessionTrustWindow.count());
      return age >= -60 && age <= window;
    }
  }
  return false;
}

TrustDecision TestbedState::evaluate_trust_locked(const Account& a, const LoginContext& ctx) const {
  TrustDecision d;
  const auto& rc = config_.risk_controls;
  if (config_.placement == RememberPlacement::kNone || config_.broken2fa || !rc.any()) {
    d.reasons.push_back("remember-device unavailable");
    return d;
  }
  if (rc.cookie_based) {
    for (const auto& spec : config_.trust_cookies) {
      auto it = ctx.cookies.find(spec.name);
      if (it == ctx.cookies.end()) {
        d.reasons.push_back("cookie " + spec.name + " missing");
      } else if (!trust_value_valid(spec, a, it->second)) {
        d.reasons.push_back("cookie " + spec.name + " invalid");
      }
    }
  }
  if (rc.fingerprint_based && !a.trusted_fingerprints.count(ctx.fingerprint)) {
    d.reasons.push_back("fingerprint unknown");
  }
  if (rc.ip_based && !a.trusted_ips.count(ctx.ip)) d.reasons.push_back("ip unknown");
  if (rc.device_token_based && !a.device_tokens.count(ctx.device_token)) {
    d.reasons.push_back("device token unknown");
  }
  d.trusted = d.reasons.empty();
  return d;
}

TrustDecision TestbedState::evaluate_trust(const std::string& account,
                                           const LoginContext& ctx) const {
  std::lock_guard lock(mu_);
  auto it = accounts_.find(account);
  if (it == accounts_.end()) return {false, {"unknown account"}};
  return evaluate_trust_locked(it->second, ctx);
}

void TestbedState::issue_trust(Account& a, const LoginContext& ctx, const std::string& code,
                               std::vector<std::string>& set_cookies,
                               std::optional<std::string>& token) {
  const auto& rc = config_.risk_controls;
  Timestamp now = clock_->now_seconds();
  if (rc.cookie_based) {
    for (const auto& spec : config_.trust_cookies) {
      std::string v = trust_value(spec, a, ctx, code);
      std::optional<Timestamp> exp;
      if (spec.max_age_seconds) exp = now + std::chrono::seconds(*spec.max_age_seconds);
      a.issued[spec.name][v] = exp;
      set_cookies.push_back(
          set_cookie_header(spec.name, v, spec.secure, spec.http_only, spec.max_age_seconds));
    }
  }
  if (rc.fingerprint_based && !ctx.fingerprint.empty()) a.trusted_fingerprints.insert(ctx.fingerprint);
  if (rc.ip_based && !ctx.ip.empty()) a.trusted_ips.insert(ctx.ip);
  if (rc.device_token_based) {
    token = random_hex(16);
    a.device_tokens.insert(*token);
  }
}

void TestbedState::complete_login(Account& a, const Session& s, const LoginContext& ctx) {
  bool known_device = a.known_devices.count({ctx.fingerprint, ctx.ip}) > 0;
  bool known_ip = a.known_ips.count(ctx.ip) > 0;
  bool new_device = !s.pre_trusted || !known_device;
  a.known_devices.insert({ctx.fingerprint, ctx.ip});
  a.known_ips.insert(ctx.ip);
  if (!config_.notification) return;
  NotificationRecord r;
  r.account = a.spec.username;
  r.at = clock_->now_seconds();
  switch (*config_.notification) {
    case NotificationType::kN1:
      if (!new_device) return;
      r.kind = "new-device";
      r.detail = "new device signed in";
      break;
    case NotificationType::kN2:
      if (!new_device) return;
      r.kind = "new-device";
      r.detail = "new device signed in";
      r.metadata["time"] = format_rfc3339(r.at);
      r.metadata["location"] = "near " + ctx.ip;
      break;
    case NotificationType::kN3:
      if (known_ip) return;
      r.kind = "abnormal-ip";
      r.detail = "sign-in from an unusual IP address";
      r.metadata["ip"] = ctx.ip;
      break;
    case NotificationType::kN4:
      if (!new_device) return;
      r.kind = "suspicious-login";
      r.detail = "suspicious sign-in attempt";
      break;
    case NotificationType::kN5:
      if (!new_device) return;
      r.kind = "password-reset";
      r.detail = "password reset required after new sign-in";
      break;
    case NotificationType::kN6:
      return;
  }
  log_.push_back(std::move(r));
}

TestbedState::LoginOutcome TestbedState::login(const std::string& username,
                                               const std::string& password,
                                               const LoginContext& ctx) {
  std::lock_guard lock(mu_);
  LoginOutcome out;
  auto it = accounts_.find(username);
  if (it == accounts_.end() || it->second.spec.password_hash != hash_password(password)) {
    out.status = LoginOutcome::Status::kBadCredentials;
    return out;
  }
  Account& a = it->second;
  ++a.password_logins;
  Session s{username, false, false};
  auto trust = evaluate_trust_locked(a, ctx);
  bool skip = config_.broken2fa ||
              (config_.skip_prompt_every > 0 && a.password_logins % config_.skip_prompt_every == 0);
  if (trust.trusted || skip) {
    s.authenticated = true;
    s.pre_trusted = trust.trusted;
    complete_login(a, s, ctx);
  }
  out.requires2fa = !s.authenticated;
  std::string sid = new_session(s);
  out.set_cookies.push_back(set_cookie_header("sid", sid, false, true, std::nullopt));
  return out;
}

SecondFactorOutcome TestbedState::verify_second_factor(const LoginContext& ctx,
                                                       const std::string& code,
                                                       bool remember_device) {
  std::lock_guard lock(mu_);
  SecondFactorOutcome out;
  Session* s = session_for(ctx);
  if (!s || s->authenticated) {
    out.status = SecondFactorOutcome::Status::kNoPendingLogin;
    return out;
  }
  Account& a = accounts_.at(s->account);
  auto counter = totp_counter(clock_->now_seconds(), std::chrono::seconds(30));
  std::optional<std::uint64_t> match;
  bool replayed = false;
  for (std::int64_t off : {0, -1, 1}) {
    if (off < 0 && counter == 0) continue;
    std::uint64_t c = counter + off;
    if (hotp_code(a.seed, c, 6) != code) continue;
    if (a.used_counters.count(c)) {
      replayed = true;
      continue;
    }
    match = c;
    break;
  }
  if (!match) {
    out.status = replayed ? SecondFactorOutcome::Status::kReplayedCode
                          : SecondFactorOutcome::Status::kBadCode;
    if (!replayed && config_.notification == NotificationType::kN6) {
      NotificationRecord r;
      r.account = a.spec.username;
      r.kind = "wrong-code";
      r.at = clock_->now_seconds();
      r.detail = "an incorrect 2FA code was entered";
      log_.push_back(std::move(r));
    }
    return out;
  }
  a.used_counters.insert(*match);

  Session done = *s;
  done.authenticated = true;
  sessions_.erase(ctx.cookies.at("sid"));
  std::string sid = new_session(done);
  out.set_cookies.push_back(set_cookie_header("sid", sid, false, true, std::nullopt));
  for (int i = 0; i < config_.decoy_cookies; ++i) {
    out.set_cookies.push_back(
        set_cookie_header(kDecoyNames[i], random_hex(4), false, false, 365 * 86400));
  }
  if (remember_device && (config_.placement == RememberPlacement::kAtChallenge ||
                          config_.placement == RememberPlacement::kRememberMe)) {
    issue_trust(a, ctx, code, out.set_cookies, out.device_token);
  }
  complete_login(a, done, ctx);
  return out;
}

int TestbedState::trust_device(const LoginContext& ctx, std::vector<std::string>& set_cookies,
                               std::optional<std::string>& device_token) {
  std::lock_guard lock(mu_);
  if (config_.placement != RememberPlacement::kInSettings) return 404;
  Session* s = session_for(ctx);
  if (!s || !s->authenticated) return 401;
  issue_trust(accounts_.at(s->account), ctx, "", set_cookies, device_token);
  return 200;
}

std::optional<std::string> TestbedState::account_for(const LoginContext& ctx) const {
  std::lock_guard lock(mu_);
  const Session* s = session_for(ctx);
  if (!s || !s->authenticated) return std::nullopt;
  return s->account;
}

std::vector<std::string> TestbedState::logout(const LoginContext& ctx) {
  std::lock_guard lock(mu_);
  if (auto it = ctx.cookies.find("sid"); it != ctx.cookies.end()) sessions_.erase(it->second);
  return {"sid=; Path=/; Max-Age=0; HttpOnly; SameSite=Lax"};
}

std::vector<NotificationRecord> TestbedState::notifications(const std::string& account) const {
  std::lock_guard lock(mu_);
  std::vector<NotificationRecord> out;
  for (const auto& r : log_) {
    if (account.empty() || r.account == account) out.push_back(r);
  }
  return out;
}

namespace {

LoginContext context_of(const httplib::Request& req) {
  LoginContext ctx;
  ctx.fingerprint = req.get_header_value("X-Device-Fingerprint");
  ctx.ip = req.get_header_value("X-Forwarded-For");
  if (ctx.ip.empty()) ctx.ip = req.remote_addr;
  ctx.device_token = req.get_header_value("X-Device-Token");
  auto range = req.headers.equal_range("Cookie");
  for (auto it = range.first; it != range.second; ++it) {
    std::string_view h = it->second;
    while (!h.empty()) {
      auto semi = h.find(';');
      auto pair = h.substr(0, semi);
      h = semi == std::string_view::npos ? std::string_view{} : h.substr(semi + 1);
      while (!pair.empty() && pair.front() == ' ') pair.remove_prefix(1);
      auto eq = pair.find('=');
      if (eq == std::string_view::npos) continue;
      ctx.cookies.emplace(std::string(pair.substr(0, eq)), std::string(pair.substr(eq + 1)));
    }
  }
  return ctx;
}

void reply(httplib::Response& res, int status, const Json& body,
           const std::vector<std::string>& set_cookies = {}) {
  res.status = status;
  for (const auto& c : set_cookies) res.headers.emplace("Set-Cookie", c);
  res.set_content(body.dump(), "application/json");
}

std::optional<Json> json_body(const httplib::Request& req) {
  auto j = Json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  return j;
}

}  // namespace

TestbedService::TestbedService(TargetConfig config, std::shared_ptr<const Clock> clock,
                               ServiceOptions options)
    : state_(std::make_unique<TestbedState>(std::move(config), std::move(clock))),
      options_(std::move(options)) {
  if (options_.tls_cert || options_.tls_key) {
    if (!options_.tls_cert || !options_.tls_key) {
      throw Error(ErrorCode::kInvalidConfig, "TLS needs both a certificate and a key");
    }
    auto tls = std::make_unique<httplib::SSLServer>(options_.tls_cert->c_str(),
                                                    options_.tls_key->c_str());
    if (!tls->is_valid()) throw Error(ErrorCode::kInvalidConfig, "cannot load TLS certificate");
    server_ = std::move(tls);
  } else {
    server_ = std::make_unique<httplib::Server>();
  }
  // httplib defaults to SO_REUSEPORT, which lets a second service share a
  // busy port instead of failing.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  install_routes();
}

TestbedService::~TestbedService() { stop(); }

void TestbedService::install_routes() {
  auto& st = *state_;
  auto& srv = *server_;
  srv.Post("/login", [&st](const httplib::Request& req, httplib::Response& res) {
    auto body = json_body(req);
    if (!body || !(*body)["username"].is_string() || !(*body)["password"].is_string()) {
      return reply(res, 400, {{"status", "bad_request"}});
    }
    auto out = st.login((*body)["username"], (*body)["password"], context_of(req));
    if (out.status == TestbedState::LoginOutcome::Status::kBadCredentials) {
      return reply(res, 401, {{"status", "invalid_credentials"}});
    }
    reply(res, 200, {{"status", "ok"}, {"requires2fa", out.requires2fa}}, out.set_cookies);
  });
  srv.Post("/2fa", [&st](const httplib::Request& req, httplib::Response& res) {
    auto body = json_body(req);
    if (!body || !(*body)["code"].is_string()) return reply(res, 400, {{"status", "bad_request"}});
    bool remember = body->value("rememberDevice", false);
    auto out = st.verify_second_factor(context_of(req), (*body)["code"], remember);
    using S = SecondFactorOutcome::Status;
    switch (out.status) {
      case S::kBadCode: return reply(res, 401, {{"status", "bad_code"}});
      case S::kReplayedCode: return reply(res, 401, {{"status", "replayed_code"}});
      case S::kNoPendingLogin: return reply(res, 401, {{"status", "no_pending_login"}});
      case S::kOk: break;
    }
    Json j{{"status", "ok"}};
    if (out.device_token) j["deviceToken"] = *out.device_token;
    reply(res, 200, j, out.set_cookies);
  });
  srv.Post("/settings/trust-device", [&st](const httplib::Request& req, httplib::Response& res) {
    std::vector<std::string> cookies;
    std::optional<std::string> token;
    int status = st.trust_device(context_of(req), cookies, token);
    Json j{{"status", status == 200 ? "ok" : status == 401 ? "unauthenticated" : "not_found"}};
    if (token) j["deviceToken"] = *token;
    reply(res, status, j, cookies);
  });
  srv.Get("/account", [&st](const httplib::Request& req, httplib::Response& res) {
    auto who = st.account_for(context_of(req));
    if (!who) return reply(res, 401, {{"status", "unauthenticated"}});
    reply(res, 200, {{"status", "ok"}, {"account", *who}});
  });
  srv.Post("/logout", [&st](const httplib::Request& req, httplib::Response& res) {
    reply(res, 200, {{"status", "ok"}}, st.logout(context_of(req)));
  });
  srv.Get("/__notifications", [&st](const httplib::Request& req, httplib::Response& res) {
    Json list = Json::array();
    for (const auto& r : st.notifications(req.get_param_value("account"))) {
      list.push_back(notification_to_json(r));
    }
    reply(res, 200, {{"notifications", list}});
  });
  if (options_.expose_truth) {
    srv.Get("/__ground_truth", [&st](const httplib::Request&, httplib::Response& res) {
      reply(res, 200, ground_truth_to_json(ground_truth(st.config())));
    });
    srv.Post("/__reset", [&st](const httplib::Request&, httplib::Response& res) {
      st.reset();
      reply(res, 200, {{"status", "ok"}});
    });
  }
}

void TestbedService::start(const std::string& host, int port) {
  host_ = host;
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
    if (port_ < 0) throw Error(ErrorCode::kPortInUse, "no free port on " + host);
  } else {
    if (!server_->bind_to_port(host, port)) {
      throw Error(ErrorCode::kPortInUse, host + ":" + std::to_string(port) + " is in use");
    }
    port_ = port;
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void TestbedService::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string TestbedService::base_url() const {
  std::string scheme = options_.tls_cert ? "https" : "http";
  return scheme + "://" + host_ + ":" + std::to_string(port_);
}

TestbedFleet::TestbedFleet(const std::vector<TargetConfig>& configs,
                           std::shared_ptr<const Clock> clock, ServiceOptions options) {
  for (const auto& c : configs) {
    services_.push_back(std::make_unique<TestbedService>(c, clock, options));
  }
}

void TestbedFleet::start(const std::string& host, int base_port) {
  for (std::size_t i = 0; i < services_.size(); ++i) {
    services_[i]->start(host, base_port == 0 ? 0 : base_port + static_cast<int>(i));
  }
}

void TestbedFleet::stop() {
  for (auto& s : services_) s->stop();
}

}  // namespace se2fa
