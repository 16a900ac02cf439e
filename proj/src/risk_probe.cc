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

#include "se2fa/risk_probe.h"

#include "se2fa/error.h"

namespace se2fa {

Json measures_to_json(const MeasureSet& m) {
  return Json{{"cookieBased", m.cookie_based},
              {"fingerprintBased", m.fingerprint_based},
              {"ipBased", m.ip_based},
              {"deviceTokenBased", m.device_token_based}};
}

MeasureSet measures_from_json(const Json& j) {
  MeasureSet m;
  m.cookie_based = j.value("cookieBased", false);
  m.fingerprint_based = j.value("fingerprintBased", false);
  m.ip_based = j.value("ipBased", false);
  m.device_token_based = j.value("deviceTokenBased", false);
  return m;
}

std::vector<std::string> TrustCookieSet::names() const {
  std::vector<std::string> out;
  for (const auto& k : keys) out.push_back(k.name);
  return out;
}

Json trust_to_json(const TrustCookieSet& t) {
  Json keys = Json::array();
  for (const auto& k : t.keys) keys.push_back(key_to_json(k));
  Json records = Json::array();
  for (const auto& r : t.records) records.push_back(cookie_to_json(r));
  return Json{{"keys", keys}, {"records", records}};
}

TrustCookieSet trust_from_json(const Json& j) {
  TrustCookieSet t;
  for (const auto& k : j.at("keys")) t.keys.insert(key_from_json(k));
  std::size_t i = 0;
  for (const auto& r : j.at("records")) t.records.push_back(cookie_from_json(r, i++));
  return t;
}

EnvFactory default_env_factory() {
  return [](EnvRole role) {
    SessionEnv env;
    if (role == EnvRole::kVictim) {
      env.fingerprint = "fp-victim-chrome-124-linux";
      env.simulated_ip = "198.51.100.7";
    } else {
      env.fingerprint = "fp-attacker-firefox-126-windows";
      env.simulated_ip = "203.0.113.66";
    }
    return env;
  };
}

RiskProbe::RiskProbe(Target target, std::shared_ptr<const Clock> clock, EnvFactory envs)
    : driver_(std::move(target), std::move(clock)), envs_(std::move(envs)) {}

void RiskProbe::begin_trial() { target().reset(); }

bool RiskProbe::login_prompts(const Credentials& account, SessionEnv& env) {
  FlowScript s{{LoginStep{}}};
  return driver_.execute(s, env, account).prompts.at(0).prompted;
}

FlowResult RiskProbe::run_remember_flow(const Credentials& account, SessionEnv& env) {
  FlowScript s;
  s.steps.push_back(LoginStep{});
  s.steps.push_back(SnapshotStep{"pre"});
  s.steps.push_back(Solve2faStep{route_ == RememberRoute::kAtChallenge});
  if (route_ == RememberRoute::kInSettings) s.steps.push_back(TrustDeviceStep{});
  s.steps.push_back(SnapshotStep{"post"});
  return driver_.execute(s, env, account);
}

bool RiskProbe::probe_remember_device(const Credentials& account) {
  begin_trial();
  SessionEnv env = envs_(EnvRole::kVictim);
  FlowScript s{{LoginStep{}, Solve2faStep{true}, LogoutStep{}, LoginStep{}}};
  auto r = driver_.execute(s, env, account);
  if (!r.prompts.at(1).prompted) {
    route_ = RememberRoute::kAtChallenge;
    return true;
  }

  begin_trial();
  env = envs_(EnvRole::kVictim);
  FlowScript settings{{LoginStep{}, Solve2faStep{false}, TrustDeviceStep{}, LogoutStep{}, LoginStep{}}};
  try {
    r = driver_.execute(settings, env, account);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kChallengeFailed && e.index() == std::size_t{2}) return false;
    throw;
  }
  if (!r.prompts.at(1).prompted) {
    route_ = RememberRoute::kInSettings;
    return true;
  }
  return false;
}

bool RiskProbe::probe_cookie_based(const Credentials& account) {
  begin_trial();
  SessionEnv env = envs_(EnvRole::kVictim);
  run_remember_flow(account, env);
  FlowScript s{{LogoutStep{}, ClearAllStep{}, LoginStep{}}};
  return driver_.execute(s, env, account).prompts.at(0).prompted;
}

SessionEnv RiskProbe::equalize(const SessionEnv& attacker, const SessionEnv& victim,
                               const MeasureSet& m) const {
  SessionEnv env = attacker;
  if (m.fingerprint_based) env.fingerprint = victim.fingerprint;
  if (m.ip_based) env.simulated_ip = victim.simulated_ip;
  if (m.device_token_based) {
    if (auto it = victim.device_token_store.find(target().id());
        it != victim.device_token_store.end()) {
      env.device_token_store[target().id()] = it->second;
    }
  }
  return env;
}

MeasureSet RiskProbe::probe_additional_measures(const Credentials& account,
                                                const SessionEnv& victim_env,
                                                const SessionEnv& attacker_env) {
  Timestamp now = driver_.clock().now_seconds();
  SessionEnv jar_source = victim_env;
  CookieSnapshot victim_jar = jar_source.jar.snapshot("victim", now);

  auto attempt = [&](const MeasureSet& eq, bool with_cookies) {
    SessionEnv env = equalize(attacker_env, victim_env, eq);
    env.jar.clear();
    if (with_cookies) env.jar.import(victim_jar, now);
    return !login_prompts(account, env);
  };

  if (attempt(MeasureSet{}, true)) return MeasureSet{.cookie_based = true};

  // Fixed attribution order: fingerprint, IP, token, then pairs, then all.
  const MeasureSet combos[] = {
      {.fingerprint_based = true},
      {.ip_based = true},
      {.device_token_based = true},
      {.fingerprint_based = true, .ip_based = true},
      {.fingerprint_based = true, .device_token_based = true},
      {.ip_based = true, .device_token_based = true},
      {.fingerprint_based = true, .ip_based = true, .device_token_based = true},
  };
  for (const auto& eq : combos) {
    if (!attempt(eq, true)) continue;
    MeasureSet m = eq;
    m.cookie_based = victim_jar.empty() ? false : !attempt(eq, false);
    return m;
  }
  throw Error(ErrorCode::kInconclusive, "no factor combination suppresses the 2FA prompt");
}

BypassReport RiskProbe::verify_bypass_detailed(const Credentials& account,
                                               const TrustCookieSet& trust,
                                               const SessionEnv& attacker_env) {
  Timestamp now = driver_.clock().now_seconds();
  SessionEnv env = attacker_env;
  env.jar.clear();
  for (const auto& r : trust.records) {
    if (trust.keys.count(r.key())) env.jar.store(r, now);
  }
  FlowScript s{{LoginStep{}, LogoutStep{}, LoginStep{}}};
  auto r = driver_.execute(s, env, account);
  BypassReport rep;
  rep.verification = !r.prompts.at(0).prompted;
  rep.confirmation = !r.prompts.at(1).prompted;
  rep.authenticated = r.final_authenticated;
  return rep;
}

bool RiskProbe::verify_bypass(const Credentials& account, const TrustCookieSet& trust,
                              const SessionEnv& attacker_env) {
  return verify_bypass_detailed(account, trust, attacker_env).ok();
}

TrustCookieSet RiskProbe::isolate_trust_cookies(const Credentials& account,
                                                SessionEnv& victim_env,
                                                const SessionEnv& attacker_env) {
  auto flow = run_remember_flow(account, victim_env);
  const auto& pre = flow.snapshots.at("pre");
  const auto& post = flow.snapshots.at("post");
  auto candidates = diff_snapshots(pre, post).introduced_keys();

  auto make_set = [&](const std::set<CookieKey>& keys) {
    TrustCookieSet t;
    t.keys = keys;
    for (const auto& k : keys) t.records.push_back(*post.find(k));
    return t;
  };
  // The attacker also needs any non-cookie factors the victim was trusted
  // on; callers pass an already equalized environment for that.
  if (!verify_bypass(account, make_set(candidates), attacker_env)) {
    throw Error(ErrorCode::kIsolationFailed, "the full candidate set does not bypass the prompt");
  }
  std::set<CookieKey> kept = candidates;
  for (const auto& k : candidates) {
    auto trial = kept;
    trial.erase(k);
    if (verify_bypass(account, make_set(trial), attacker_env)) kept = std::move(trial);
  }
  auto result = make_set(kept);
  if (!verify_bypass(account, result, attacker_env)) {
    throw Error(ErrorCode::kIsolationFailed, "reduced set no longer bypasses");
  }
  return result;
}

}  // namespace se2fa
