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

#include "se2fa/evaluator.h"

#include "se2fa/error.h"
#include "se2fa/totp.h"

namespace se2fa {
namespace {

std::optional<NotificationType> probe_notification(RiskProbe& probe, const Credentials& account,
                                                   std::vector<std::string>& notes) {
  probe.begin_trial();
  const auto& target = probe.target();
  SessionEnv victim = probe.make_env(EnvRole::kVictim);
  probe.run_remember_flow(account, victim);
  auto before = target.notifications(account.username).size();

  // Attacker replays the victim's jar from a foreign device and completes
  // the login, solving the challenge if one appears.
  Timestamp now = probe.driver().clock().now_seconds();
  SessionEnv attacker = probe.make_env(EnvRole::kAttacker);
  attacker.jar.import(victim.jar.snapshot("victim", now), now);
  FlowScript bypass{{LoginStep{}, Solve2faStep{false}}};
  probe.driver().execute(bypass, attacker, account);

  // A fresh login with the right password and a wrong code.
  SessionEnv wrong = probe.make_env(EnvRole::kAttacker);
  auto r = probe.driver().execute(FlowScript{{LoginStep{}}}, wrong, account);
  if (r.prompts.at(0).prompted) {
    auto good = totp_code(account.totp_seed, probe.driver().clock().now_seconds(), account.step,
                          account.digits);
    std::string bad = good;
    for (int tries = 0; tries < 10; ++tries) {
      bad.back() = static_cast<char>('0' + (bad.back() - '0' + 1) % 10);
      bool valid = false;
      for (int off : {-1, 0, 1}) {
        valid = valid || bad == totp_code(account.totp_seed, now + off * account.step,
                                          account.step, account.digits);
      }
      if (!valid) break;
    }
    Json body{{"code", bad}, {"rememberDevice", false}};
    target.send("POST", target.profile().challenge_path, &body, wrong, now);
  }

  auto log = target.notifications(account.username);
  std::vector<NotificationRecord> delta(log.begin() + std::min(before, log.size()), log.end());
  if (!delta.empty()) {
    notes.push_back("notification probe observed " + std::to_string(delta.size()) + " record(s)");
  }
  return classify_notifications(delta);
}

// Four remember flows (victim twice, attacker twice) feeding the value
// analysis, then the active cross-account and forge tests.
void run_flaw_battery(RiskProbe& probe, const Credentials& victim, const Credentials& attacker,
                      const SessionEnv& attacker_env_template, EvaluationVerdict& v) {
  auto keys = v.trust.keys;
  auto isolate = [&](const Credentials& acct, EnvRole role, TimePoint& at) {
    SessionEnv env = probe.make_env(role);
    auto r = probe.run_remember_flow(acct, env);
    at = r.login_times.at(0);
    TrustCookieSet t;
    const auto& post = r.snapshots.at("post");
    for (const auto& k : keys) {
      if (const auto* rec = post.find(k)) {
        t.keys.insert(k);
        t.records.push_back(*rec);
      }
    }
    return t;
  };

  probe.begin_trial();
  std::vector<TrustCookieSet> sets(4);
  std::vector<Timestamp> times(4);
  TimePoint at;
  sets[0] = isolate(victim, EnvRole::kVictim, at);
  times[0] = to_timestamp(at);
  sets[1] = isolate(victim, EnvRole::kVictim, at);
  times[1] = to_timestamp(at);
  sets[2] = isolate(attacker, EnvRole::kAttacker, at);
  times[2] = to_timestamp(at);
  sets[3] = isolate(attacker, EnvRole::kAttacker, at);
  times[3] = to_timestamp(at);

  auto analysis = analyze_value_scheme(sets, times);
  std::vector<DesignFlaw> flaws = analysis.flaws;
  auto kinds = analysis.kinds();

  // The attacker's own cookies against the victim's account.
  SessionEnv fresh = attacker_env_template;
  fresh.jar.clear();
  if (!kinds.count(FlawKind::kCrossAccountReuse) &&
      test_cross_account_reuse(probe, victim, sets[3], fresh)) {
    flaws.push_back({FlawKind::kCrossAccountReuse,
                     "another account's trust cookies suppress the victim's prompt", std::nullopt,
                     std::nullopt, std::nullopt});
  }

  probe.begin_trial();
  for (const auto& f : flaws) {
    if (f.kind != FlawKind::kPredictableTimestamp && f.kind != FlawKind::kFixedValue) continue;
    TrustCookieSet forged = sets[0];
    for (auto& rec : forged.records) {
      if (f.cookie && rec.key() == *f.cookie) {
        rec = forge_cookie_value(f, rec, probe.driver().clock().now());
      }
    }
    bool ok = probe.verify_bypass(victim, forged, fresh);
    v.notes.push_back(std::string("forged ") + std::string(flaw_name(f.kind)) + " cookie " +
                      (ok ? "accepted" : "rejected"));
  }
  v.audit.flaws = std::move(flaws);
  v.audit.warnings = std::move(analysis.warnings);
}

}  // namespace

Json verdict_to_json(const EvaluationVerdict& v) {
  Json attacks = Json::array();
  for (auto a : v.attacks) attacks.push_back(attack_name(a));
  return Json{{"target", v.target},
              {"rememberDevice", v.remember_device},
              {"measures", measures_to_json(v.measures)},
              {"trust", trust_to_json(v.trust)},
              {"audit", audit_to_json(v.audit)},
              {"attacks", attacks},
              {"notification",
               v.notification ? Json(notification_name(*v.notification)) : Json(nullptr)},
              {"notificationProbed", v.notification_probed},
              {"notes", v.notes}};
}

EvaluationVerdict verdict_from_json(const Json& j) {
  EvaluationVerdict v;
  try {
    v.target = j.value("target", "");
    v.remember_device = j.at("rememberDevice").get<bool>();
    v.measures = measures_from_json(j.at("measures"));
    v.trust = trust_from_json(j.at("trust"));
    v.audit = audit_from_json(j.at("audit"));
    for (const auto& a : j.at("attacks")) {
      auto t = attack_from_name(a.get<std::string>());
      if (!t) throw Error(ErrorCode::kFormatError, "unknown attack " + a.dump());
      v.attacks.insert(*t);
    }
    if (j.contains("notification") && !j["notification"].is_null()) {
      v.notification = notification_from_name(j["notification"].get<std::string>());
    }
    v.notification_probed = j.value("notificationProbed", false);
    if (j.contains("notes")) v.notes = j["notes"].get<std::vector<std::string>>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("verdict: ") + e.what());
  }
  return v;
}

EvaluationVerdict evaluate_target(const Target& target, const Credentials& account,
                                  std::shared_ptr<const Clock> clock,
                                  const EvaluateOptions& options, EnvFactory envs) {
  RiskProbe probe(target, clock, envs);
  EvaluationVerdict v;
  v.target = target.id();

  // Broken 2FA: fresh, cleared devices never see a challenge.
  probe.begin_trial();
  std::vector<FlowResult> fresh_logins;
  for (int i = 0; i < options.broken_check_logins; ++i) {
    SessionEnv env = probe.make_env(i % 2 ? EnvRole::kAttacker : EnvRole::kVictim);
    fresh_logins.push_back(probe.driver().execute(FlowScript{{LoginStep{}, LogoutStep{}}}, env, account));
  }
  bool broken = detect_broken_2fa(fresh_logins, &v.notes);

  if (broken) {
    v.audit.flaws.push_back({FlawKind::kBroken2fa, "no 2FA prompt on " +
                                                       std::to_string(fresh_logins.size()) +
                                                       " fresh logins",
                             std::nullopt, std::nullopt, std::nullopt});
    v.attacks = classify_attack_surface(v.audit);
  } else if (probe.probe_remember_device(account)) {
    v.remember_device = true;
    if (probe.route() == RememberRoute::kInSettings) {
      v.notes.push_back("remember-device is enabled from account settings");
    }
    bool cookie_probe = probe.probe_cookie_based(account);
    if (!cookie_probe) v.notes.push_back("prompt did not reappear after clearing browser data");

    probe.begin_trial();
    SessionEnv victim = probe.make_env(EnvRole::kVictim);
    probe.run_remember_flow(account, victim);
    SessionEnv attacker = probe.make_env(EnvRole::kAttacker);
    v.measures = probe.probe_additional_measures(account, victim, attacker);

    if (v.measures.cookie_based) {
      probe.begin_trial();
      SessionEnv iso_victim = probe.make_env(EnvRole::kVictim);
      // Non-cookie factors are matched against this trial's victim device.
      SessionEnv eq = attacker;
      if (v.measures.fingerprint_based) eq.fingerprint = iso_victim.fingerprint;
      if (v.measures.ip_based) eq.simulated_ip = iso_victim.simulated_ip;
      v.trust = probe.isolate_trust_cookies(account, iso_victim, eq);
      auto rep = probe.verify_bypass_detailed(account, v.trust, eq);
      v.notes.push_back(std::string("bypass verification ") + (rep.verification ? "passed" : "failed") +
                        ", confirmation " + (rep.confirmation ? "passed" : "failed"));
    }
    v.audit = build_audit(v.measures, v.trust);

    if (v.measures.cookie_only()) {
      if (options.second_account) {
        run_flaw_battery(probe, account, *options.second_account, attacker, v);
      } else {
        v.notes.push_back("design-flaw battery skipped: no second account");
      }
    }
    bool client_storage_only = !v.measures.fingerprint_based && !v.measures.ip_based;
    if (client_storage_only && (!v.audit.per_cookie.empty() || v.audit.uses_local_storage)) {
      v.attacks = classify_attack_surface(v.audit);
    }
  }

  if (options.probe_notifications) {
    v.notification = probe_notification(probe, account, v.notes);
    v.notification_probed = true;
  }
  return v;
}

}  // namespace se2fa
