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

#include "se2fa/flow.h"

#include <charconv>
#include <fstream>
#include <regex>
#include <sstream>

#include <httplib.h>

#include "se2fa/error.h"
#include "se2fa/totp.h"

namespace se2fa {
namespace {

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFormatError, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormatError, path + ": " + e.what());
  }
}

std::string string_field(const Json& j, const char* key, std::size_t index = 0) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw Error(ErrorCode::kScriptInvalid, std::string("missing string field ") + key, index);
  }
  return it->get<std::string>();
}

bool is_redirect(int status) {
  return status == 301 || status == 302 || status == 303 || status == 307 || status == 308;
}

struct ParsedUrl {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string path;
};

ParsedUrl parse_url(std::string_view url) {
  ParsedUrl u;
  auto sep = url.find("://");
  if (sep == std::string_view::npos) throw Error(ErrorCode::kInvalidArgument, "bad url " + std::string(url));
  u.scheme = std::string(url.substr(0, sep));
  if (u.scheme != "http" && u.scheme != "https") {
    throw Error(ErrorCode::kInvalidArgument, "unsupported scheme " + u.scheme);
  }
  auto rest = url.substr(sep + 3);
  auto slash = rest.find('/');
  auto authority = rest.substr(0, slash);
  u.path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
  auto colon = authority.rfind(':');
  if (colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
    u.host = std::string(authority.substr(0, colon));
    auto digits = authority.substr(colon + 1);
    auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), u.port);
    if (ec != std::errc() || end != digits.data() + digits.size() || u.port <= 0 || u.port > 65535) {
      throw Error(ErrorCode::kInvalidArgument, "bad port in " + std::string(url));
    }
  } else {
    u.host = std::string(authority);
    u.port = u.scheme == "https" ? 443 : 80;
  }
  if (u.host.empty()) throw Error(ErrorCode::kInvalidArgument, "bad url " + std::string(url));
  return u;
}

std::string path_only(const std::string& target) {
  return target.substr(0, target.find('?'));
}

}  // namespace

Credentials credentials_from_json(const Json& j) {
  Credentials c;
  if (!j.is_object()) throw Error(ErrorCode::kFormatError, "credentials must be an object");
  try {
    c.username = j.at("username").get<std::string>();
    c.password = j.at("password").get<std::string>();
    auto seed = base32_decode(j.at("totpSeed").get<std::string>());
    if (!seed) throw Error(ErrorCode::kFormatError, "totpSeed is not base32");
    c.totp_seed = *seed;
    if (j.contains("digits")) c.digits = j["digits"].get<int>();
    if (j.contains("period")) c.step = std::chrono::seconds(j["period"].get<int>());
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("credentials: ") + e.what());
  }
  return c;
}

Credentials load_credentials(const std::string& path) {
  return credentials_from_json(read_json_file(path));
}

TargetProfile target_profile_from_json(const Json& j) {
  TargetProfile p;
  try {
    if (j.contains("loginUrl")) p.login_path = j["loginUrl"].get<std::string>();
    if (j.contains("challengeUrl")) p.challenge_path = j["challengeUrl"].get<std::string>();
    if (j.contains("logoutUrl")) p.logout_path = j["logoutUrl"].get<std::string>();
    if (j.contains("accountUrl")) p.account_path = j["accountUrl"].get<std::string>();
    if (j.contains("trustDeviceUrl")) p.trust_device_path = j["trustDeviceUrl"].get<std::string>();
    if (j.contains("challengeMatcher")) {
      const auto& m = j["challengeMatcher"];
      ChallengeMatcher cm;
      if (m.contains("positive")) cm.positive = m["positive"].get<std::vector<std::string>>();
      if (m.contains("negative")) cm.negative = m["negative"].get<std::vector<std::string>>();
      if (m.contains("statusCodes")) cm.positive_status = m["statusCodes"].get<std::vector<int>>();
      p.challenge_matcher = std::move(cm);
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("target profile: ") + e.what());
  }
  return p;
}

TargetProfile load_target_profile(const std::string& path) {
  return target_profile_from_json(read_json_file(path));
}

bool detect_2fa_prompt(const HttpResponse& response, const ChallengeMatcher* matcher) {
  if (matcher == nullptr) {
    auto j = Json::parse(response.body, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("requires2fa") ||
        !j["requires2fa"].is_boolean()) {
      throw Error(ErrorCode::kAmbiguousPrompt, "response has no requires2fa marker");
    }
    return j["requires2fa"].get<bool>();
  }
  auto any_match = [&](const std::vector<std::string>& patterns) {
    for (const auto& p : patterns) {
      if (std::regex_search(response.body, std::regex(p, std::regex::icase))) return true;
    }
    return false;
  };
  bool pos = any_match(matcher->positive);
  for (int s : matcher->positive_status) pos = pos || s == response.status;
  bool neg = any_match(matcher->negative);
  if (pos == neg) {
    throw Error(ErrorCode::kAmbiguousPrompt,
                pos ? "positive and negative patterns both match" : "no pattern matches");
  }
  return pos;
}

Target::Target(std::string base_url, TargetProfile profile)
    : base_url_(std::move(base_url)), profile_(std::move(profile)) {
  while (base_url_.size() > 1 && base_url_.back() == '/') base_url_.pop_back();
  auto u = parse_url(base_url_);
  scheme_ = u.scheme;
  host_ = u.host;
  port_ = u.port;
}

HttpResponse Target::send(const std::string& method, const std::string& path, const Json* body,
                          SessionEnv& env, Timestamp now,
                          std::vector<HttpExchange>* trace) const {
  std::string cur_method = method;
  std::string cur_path = path;
  std::string cur_body = body ? body->dump() : std::string();
  std::string cur_scheme = scheme_, cur_host = host_;
  int cur_port = port_;

  for (int hop = 0; hop <= 10; ++hop) {
    std::string origin = cur_scheme + "://" + cur_host + ":" + std::to_string(cur_port);
    httplib::Client cli(origin);
    cli.set_connection_timeout(5);
    cli.set_read_timeout(10);
    cli.set_follow_location(false);
    if (!verify_tls_) cli.enable_server_certificate_verification(false);

    std::string req_path = path_only(cur_path);
    auto cookies = env.jar.cookies_for(cur_host, req_path, env.secure_context, now);
    httplib::Headers headers;
    HttpExchange ex;
    ex.method = cur_method;
    ex.path = cur_path;
    ex.url = origin + cur_path;
    ex.at = now;
    if (!cookies.empty()) {
      std::string header;
      for (const auto& c : cookies) {
        if (!header.empty()) header += "; ";
        header += c.name + "=" + c.value;
        ex.sent_cookies.push_back(c.name);
      }
      headers.emplace("Cookie", header);
      ex.cookie_header = header;
    }
    if (!env.fingerprint.empty()) headers.emplace("X-Device-Fingerprint", env.fingerprint);
    if (!env.simulated_ip.empty()) headers.emplace("X-Forwarded-For", env.simulated_ip);
    if (auto it = env.device_token_store.find(id()); it != env.device_token_store.end()) {
      headers.emplace("X-Device-Token", it->second);
    }

    httplib::Result res = cur_method == "GET"
                              ? cli.Get(cur_path, headers)
                              : cli.Post(cur_path, headers, cur_body, "application/json");
    if (!res) {
      throw Error(ErrorCode::kTargetUnreachable,
                  origin + cur_path + ": " + httplib::to_string(res.error()));
    }

    HttpResponse out;
    out.status = res->status;
    out.body = res->body;
    Origin o{cur_scheme, cur_host, req_path};
    auto range = res->headers.equal_range("Set-Cookie");
    for (auto it = range.first; it != range.second; ++it) {
      out.set_cookies.push_back(it->second);
      env.jar.store_from_header(it->second, o, now);
    }
    ex.status = out.status;
    ex.set_cookies = out.set_cookies;
    ex.body = out.body;
    if (trace) trace->push_back(std::move(ex));

    if (!is_redirect(res->status) || !res->has_header("Location")) return out;
    std::string loc = res->get_header_value("Location");
    if (loc.find("://") != std::string::npos) {
      auto u = parse_url(loc);
      cur_scheme = u.scheme;
      cur_host = u.host;
      cur_port = u.port;
      cur_path = u.path;
    } else if (!loc.empty() && loc[0] == '/') {
      cur_path = loc;
    } else {
      auto dir = req_path.substr(0, req_path.rfind('/') + 1);
      cur_path = dir + loc;
    }
    if (res->status == 301 || res->status == 302 || res->status == 303) {
      cur_method = "GET";
      cur_body.clear();
    }
  }
  throw Error(ErrorCode::kTargetUnreachable, "too many redirects from " + base_url_ + path);
}

bool Target::reset() const {
  httplib::Client cli(base_url_);
  cli.set_connection_timeout(5);
  if (!verify_tls_) cli.enable_server_certificate_verification(false);
  auto res = cli.Post("/__reset", "", "application/json");
  if (!res) throw Error(ErrorCode::kTargetUnreachable, base_url_ + "/__reset");
  return res->status == 200;
}

std::vector<NotificationRecord> Target::notifications(const std::string& account) const {
  httplib::Client cli(base_url_);
  cli.set_connection_timeout(5);
  if (!verify_tls_) cli.enable_server_certificate_verification(false);
  auto res = cli.Get("/__notifications", httplib::Params{{"account", account}}, httplib::Headers{});
  if (!res) throw Error(ErrorCode::kTargetUnreachable, base_url_ + "/__notifications");
  std::vector<NotificationRecord> out;
  if (res->status != 200) return out;
  auto j = Json::parse(res->body, nullptr, false);
  if (j.is_discarded() || !j.contains("notifications")) {
    throw Error(ErrorCode::kFormatError, "bad notification log");
  }
  for (const auto& r : j["notifications"]) out.push_back(notification_from_json(r));
  return out;
}

void FlowScript::validate() const {
  bool seen_login = false;
  std::set<std::string> labels;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    if (std::holds_alternative<LoginStep>(s)) {
      seen_login = true;
    } else if (std::holds_alternative<Solve2faStep>(s) ||
               std::holds_alternative<AssertPromptStep>(s) ||
               std::holds_alternative<TrustDeviceStep>(s)) {
      if (!seen_login) throw Error(ErrorCode::kScriptInvalid, "step requires an earlier login", i);
    } else if (const auto* snap = std::get_if<SnapshotStep>(&s)) {
      if (!labels.insert(snap->label).second) {
        throw Error(ErrorCode::kScriptInvalid, "duplicate snapshot label " + snap->label, i);
      }
    }
  }
}

FlowScript flow_script_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("steps") || !j["steps"].is_array()) {
    throw Error(ErrorCode::kScriptInvalid, "script needs a steps array");
  }
  FlowScript script;
  std::size_t i = 0;
  for (const auto& s : j["steps"]) {
    if (!s.is_object()) throw Error(ErrorCode::kScriptInvalid, "step is not an object", i);
    std::string action = string_field(s, "action", i);
    try {
      if (action == "login") {
        script.steps.push_back(LoginStep{s.value("username", ""), s.value("password", "")});
      } else if (action == "solve2fa") {
        script.steps.push_back(Solve2faStep{s.value("rememberDevice", false)});
      } else if (action == "logout") {
        script.steps.push_back(LogoutStep{});
      } else if (action == "clearall") {
        script.steps.push_back(ClearAllStep{});
      } else if (action == "snapshot") {
        script.steps.push_back(SnapshotStep{string_field(s, "label", i)});
      } else if (action == "import") {
        script.steps.push_back(ImportCookiesStep{snapshot_from_json(s.at("snapshot"))});
      } else if (action == "togglemask") {
        ToggleMaskStep t;
        for (const auto& k : s.at("enabled")) t.enabled.insert(key_from_json(k));
        script.steps.push_back(std::move(t));
      } else if (action == "assertprompt") {
        script.steps.push_back(AssertPromptStep{s.value("expected", true)});
      } else if (action == "trustdevice") {
        script.steps.push_back(TrustDeviceStep{});
      } else {
        throw Error(ErrorCode::kScriptInvalid, "unknown action " + action, i);
      }
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kScriptInvalid, e.what(), i);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kScriptInvalid) throw;
      throw Error(ErrorCode::kScriptInvalid, e.what(), i);
    }
    ++i;
  }
  script.validate();
  return script;
}

Json flow_script_to_json(const FlowScript& script) {
  Json steps = Json::array();
  for (const auto& step : script.steps) {
    Json s;
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, LoginStep>) {
            s["action"] = "login";
            if (!v.username.empty()) s["username"] = v.username;
            if (!v.password.empty()) s["password"] = v.password;
          } else if constexpr (std::is_same_v<T, Solve2faStep>) {
            s["action"] = "solve2fa";
            s["rememberDevice"] = v.remember_device;
          } else if constexpr (std::is_same_v<T, LogoutStep>) {
            s["action"] = "logout";
          } else if constexpr (std::is_same_v<T, ClearAllStep>) {
            s["action"] = "clearall";
          } else if constexpr (std::is_same_v<T, SnapshotStep>) {
            s["action"] = "snapshot";
            s["label"] = v.label;
          } else if constexpr (std::is_same_v<T, ImportCookiesStep>) {
            s["action"] = "import";
            s["snapshot"] = snapshot_to_json(v.snapshot);
          } else if constexpr (std::is_same_v<T, ToggleMaskStep>) {
            s["action"] = "togglemask";
            s["enabled"] = Json::array();
            for (const auto& k : v.enabled) s["enabled"].push_back(key_to_json(k));
          } else if constexpr (std::is_same_v<T, AssertPromptStep>) {
            s["action"] = "assertprompt";
            s["expected"] = v.expected;
          } else {
            s["action"] = "trustdevice";
          }
        },
        step);
    steps.push_back(std::move(s));
  }
  return Json{{"steps", steps}};
}

FlowScript load_flow_script(const std::string& path) {
  return flow_script_from_json(read_json_file(path));
}

Json flow_result_to_json(const FlowResult& r) {
  Json j;
  j["snapshots"] = Json::object();
  for (const auto& [label, s] : r.snapshots) j["snapshots"][label] = snapshot_to_json(s);
  j["prompts"] = Json::array();
  for (const auto& p : r.prompts) {
    j["prompts"].push_back({{"stepIndex", p.step_index}, {"prompted2fa", p.prompted}});
  }
  j["finalAuthenticated"] = r.final_authenticated;
  j["httpTrace"] = Json::array();
  for (const auto& e : r.http_trace) {
    j["httpTrace"].push_back({{"request", e.method + " " + e.path},
                              {"sentCookies", e.sent_cookies},
                              {"status", e.status},
                              {"setCookies", e.set_cookies}});
  }
  return j;
}

FlowDriver::FlowDriver(Target target, std::shared_ptr<const Clock> clock)
    : target_(std::move(target)), clock_(std::move(clock)) {}

FlowResult FlowDriver::execute(const FlowScript& script, SessionEnv& env,
                               const Credentials& account) const {
  script.validate();
  const auto& prof = target_.profile();
  const ChallengeMatcher* matcher = prof.challenge_matcher ? &*prof.challenge_matcher : nullptr;
  FlowResult result;
  bool pending_challenge = false;
  std::string username = account.username;

  for (std::size_t i = 0; i < script.steps.size(); ++i) {
    const auto& step = script.steps[i];
    Timestamp now = clock_->now_seconds();

    if (const auto* login = std::get_if<LoginStep>(&step)) {
      username = login->username.empty() ? account.username : login->username;
      Json body{{"username", username},
                {"password", login->password.empty() ? account.password : login->password}};
      result.login_times.push_back(clock_->now());
      auto res = target_.send("POST", prof.login_path, &body, env, now, &result.http_trace);
      if (res.status == 401 || res.status == 403) {
        throw Error(ErrorCode::kAuthFailed, "login rejected for " + username, i);
      }
      if (res.status != 200) {
        throw Error(ErrorCode::kAuthFailed,
                    "login returned HTTP " + std::to_string(res.status), i);
      }
      pending_challenge = detect_2fa_prompt(res, matcher);
      result.prompts.push_back({i, pending_challenge});
    } else if (const auto* solve = std::get_if<Solve2faStep>(&step)) {
      if (!pending_challenge) continue;
      // A code already used in this window is rejected as a replay; the
      // neighbouring windows are still inside the server's tolerance.
      bool solved = false;
      std::string last;
      for (int offset : {0, 1, -1}) {
        auto t = now + offset * account.step;
        Json body{{"code", totp_code(account.totp_seed, t, account.step, account.digits)},
                  {"rememberDevice", solve->remember_device}};
        auto res = target_.send("POST", prof.challenge_path, &body, env, now, &result.http_trace);
        if (res.status == 200) {
          auto j = Json::parse(res.body, nullptr, false);
          if (!j.is_discarded() && j.is_object() && j.contains("deviceToken") &&
              j["deviceToken"].is_string()) {
            env.device_token_store[target_.id()] = j["deviceToken"].get<std::string>();
          }
          solved = true;
          break;
        }
        last = res.body;
        auto j = Json::parse(res.body, nullptr, false);
        bool replayed = !j.is_discarded() && j.is_object() && j.value("status", "") == "replayed_code";
        if (!replayed) break;
      }
      if (!solved) throw Error(ErrorCode::kChallengeFailed, "code rejected: " + last, i);
      pending_challenge = false;
    } else if (std::holds_alternative<LogoutStep>(step)) {
      target_.send("POST", prof.logout_path, nullptr, env, now, &result.http_trace);
      pending_challenge = false;
    } else if (std::holds_alternative<ClearAllStep>(step)) {
      env.jar.clear();
      env.device_token_store.clear();
      pending_challenge = false;
    } else if (const auto* snap = std::get_if<SnapshotStep>(&step)) {
      result.snapshots.emplace(snap->label, env.jar.snapshot(snap->label, now));
    } else if (const auto* imp = std::get_if<ImportCookiesStep>(&step)) {
      env.jar.import(imp->snapshot, now);
    } else if (const auto* mask = std::get_if<ToggleMaskStep>(&step)) {
      auto current = env.jar.snapshot("mask", now);
      env.jar.replace_with(apply_toggle_mask(current, mask->enabled), now);
    } else if (const auto* assert_prompt = std::get_if<AssertPromptStep>(&step)) {
      bool last = !result.prompts.empty() && result.prompts.back().prompted;
      if (last != assert_prompt->expected) {
        throw Error(ErrorCode::kAssertionFailed,
                    std::string("expected ") + (assert_prompt->expected ? "" : "no ") + "2FA prompt",
                    i);
      }
    } else if (std::holds_alternative<TrustDeviceStep>(step)) {
      auto res = target_.send("POST", prof.trust_device_path, nullptr, env, now, &result.http_trace);
      if (res.status != 200) {
        throw Error(ErrorCode::kChallengeFailed,
                    "trust-device returned HTTP " + std::to_string(res.status), i);
      }
      auto j = Json::parse(res.body, nullptr, false);
      if (!j.is_discarded() && j.is_object() && j.contains("deviceToken") &&
          j["deviceToken"].is_string()) {
        env.device_token_store[target_.id()] = j["deviceToken"].get<std::string>();
      }
    }
  }

  auto res = target_.send("GET", prof.account_path, nullptr, env, clock_->now_seconds(),
                          &result.http_trace);
  result.final_authenticated = res.status == 200;
  return result;
}

}  // namespace se2fa
