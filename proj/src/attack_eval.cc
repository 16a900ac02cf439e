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

#include "se2fa/attack_eval.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <regex>

#include "se2fa/encoding.h"
#include "se2fa/error.h"

namespace se2fa {
namespace {

constexpr std::chrono::seconds kTimestampWindow = std::chrono::hours(24 * 7);
constexpr double kPrintableRatio = 0.9;
constexpr double kLowEntropyBits = 3.0;

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

Json flaw_to_json(const DesignFlaw& f) {
  Json j{{"kind", flaw_name(f.kind)}, {"evidence", f.evidence}};
  if (f.cookie) j["cookie"] = key_to_json(*f.cookie);
  if (f.observed_value) j["observedValue"] = *f.observed_value;
  if (f.timestamp) {
    j["timestamp"] = {{"prefix", f.timestamp->prefix},
                      {"suffix", f.timestamp->suffix},
                      {"millis", f.timestamp->millis}};
  }
  return j;
}

DesignFlaw flaw_from_json(const Json& j) {
  auto kind = flaw_from_name(j.at("kind").get<std::string>());
  if (!kind) throw Error(ErrorCode::kFormatError, "unknown flaw " + j.at("kind").dump());
  DesignFlaw f{*kind, j.value("evidence", ""), std::nullopt, std::nullopt, std::nullopt};
  if (j.contains("cookie")) f.cookie = key_from_json(j["cookie"]);
  if (j.contains("observedValue")) f.observed_value = j["observedValue"].get<std::string>();
  if (j.contains("timestamp")) {
    const auto& t = j["timestamp"];
    f.timestamp = TimestampPattern{t.at("prefix").get<std::string>(),
                                   t.at("suffix").get<std::string>(), t.at("millis").get<bool>()};
  }
  return f;
}

}  // namespace

std::string_view attack_name(AttackType a) {
  switch (a) {
    case AttackType::kA1: return "A1";
    case AttackType::kA2: return "A2";
    case AttackType::kA3: return "A3";
    case AttackType::kA4: return "A4";
  }
  return "?";
}

std::optional<AttackType> attack_from_name(std::string_view name) {
  for (auto a : {AttackType::kA1, AttackType::kA2, AttackType::kA3, AttackType::kA4}) {
    if (attack_name(a) == name) return a;
  }
  return std::nullopt;
}

std::string_view flaw_name(FlawKind f) {
  switch (f) {
    case FlawKind::kCrossAccountReuse: return "CrossAccountReuse";
    case FlawKind::kFixedValue: return "FixedValue";
    case FlawKind::kPredictableTimestamp: return "PredictableTimestamp";
    case FlawKind::kSensitiveEncoding: return "SensitiveEncoding";
    case FlawKind::kBroken2fa: return "Broken2FA";
  }
  return "?";
}

std::optional<FlawKind> flaw_from_name(std::string_view name) {
  for (auto f : {FlawKind::kCrossAccountReuse, FlawKind::kFixedValue,
                 FlawKind::kPredictableTimestamp, FlawKind::kSensitiveEncoding,
                 FlawKind::kBroken2fa}) {
    if (flaw_name(f) == name) return f;
  }
  return std::nullopt;
}

bool TrustCookieAudit::has_flaw(FlawKind k) const {
  return std::any_of(flaws.begin(), flaws.end(), [k](const DesignFlaw& f) { return f.kind == k; });
}

std::set<FlawKind> TrustCookieAudit::flaw_kinds() const {
  std::set<FlawKind> out;
  for (const auto& f : flaws) out.insert(f.kind);
  return out;
}

std::set<FlawKind> ValueAnalysis::kinds() const {
  std::set<FlawKind> out;
  for (const auto& f : flaws) out.insert(f.kind);
  return out;
}

Json audit_to_json(const TrustCookieAudit& a) {
  Json per = Json::array();
  for (const auto& c : a.per_cookie) {
    per.push_back({{"name", c.key.name},
                   {"domain", c.key.domain},
                   {"path", c.key.path},
                   {"secure", c.secure},
                   {"httpOnly", c.http_only},
                   {"lifetimeDays", c.lifetime_days ? Json(*c.lifetime_days) : Json(nullptr)}});
  }
  Json flaws = Json::array();
  for (const auto& f : a.flaws) flaws.push_back(flaw_to_json(f));
  return Json{{"cookieOnly", a.cookie_only},
              {"usesLocalStorage", a.uses_local_storage},
              {"perCookie", per},
              {"flaws", flaws},
              {"warnings", a.warnings}};
}

TrustCookieAudit audit_from_json(const Json& j) {
  TrustCookieAudit a;
  try {
    a.cookie_only = j.at("cookieOnly").get<bool>();
    a.uses_local_storage = j.at("usesLocalStorage").get<bool>();
    for (const auto& c : j.at("perCookie")) {
      CookieAudit ca;
      ca.key = CookieKey{c.at("name").get<std::string>(), c.value("domain", ""),
                         c.value("path", "/")};
      ca.secure = c.at("secure").get<bool>();
      ca.http_only = c.at("httpOnly").get<bool>();
      if (c.contains("lifetimeDays") && !c["lifetimeDays"].is_null()) {
        ca.lifetime_days = c["lifetimeDays"].get<int>();
      }
      a.per_cookie.push_back(std::move(ca));
    }
    for (const auto& f : j.at("flaws")) a.flaws.push_back(flaw_from_json(f));
    if (j.contains("warnings")) a.warnings = j["warnings"].get<std::vector<std::string>>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("audit: ") + e.what());
  }
  return a;
}

std::optional<int> lifetime_days(const CookieRecord& r) {
  if (!r.expires_at) return std::nullopt;
  auto secs = (*r.expires_at - r.created_at).count();
  if (secs <= 0) return 0;
  return static_cast<int>((secs + 86399) / 86400);
}

TrustCookieAudit build_audit(const MeasureSet& measures, const TrustCookieSet& trust,
                             std::vector<DesignFlaw> flaws, std::vector<std::string> warnings) {
  TrustCookieAudit a;
  a.cookie_only = measures.cookie_only();
  a.uses_local_storage = measures.device_token_based;
  for (const auto& r : trust.records) {
    if (!trust.keys.count(r.key())) continue;
    a.per_cookie.push_back({r.key(), r.secure, r.http_only, lifetime_days(r)});
  }
  std::sort(a.per_cookie.begin(), a.per_cookie.end(),
            [](const CookieAudit& x, const CookieAudit& y) { return x.key < y.key; });
  a.flaws = std::move(flaws);
  a.warnings = std::move(warnings);
  return a;
}

std::set<AttackType> classify_attack_surface(const TrustCookieAudit& audit) {
  if (audit.has_flaw(FlawKind::kBroken2fa)) return {AttackType::kA4};
  const auto& cs = audit.per_cookie;
  if (cs.empty() && !audit.uses_local_storage) {
    throw Error(ErrorCode::kEmptyAudit, "no trust cookie, token or Broken2FA to classify");
  }
  std::set<AttackType> out{AttackType::kA3};
  bool none_secure = std::none_of(cs.begin(), cs.end(), [](const CookieAudit& c) { return c.secure; });
  bool none_http_only =
      std::none_of(cs.begin(), cs.end(), [](const CookieAudit& c) { return c.http_only; });
  if (!cs.empty() && none_secure) out.insert(AttackType::kA1);
  if ((!cs.empty() && none_http_only) || audit.uses_local_storage) out.insert(AttackType::kA2);
  if (!audit.flaws.empty()) out.insert(AttackType::kA4);
  return out;
}

bool test_cross_account_reuse(RiskProbe& probe, const Credentials& account_a,
                              const TrustCookieSet& trust_b, const SessionEnv& attacker_env) {
  if (trust_b.empty()) return false;
  return probe.verify_bypass(account_a, trust_b, attacker_env);
}

double shannon_entropy(std::string_view value) {
  if (value.empty()) return 0.0;
  std::map<char, int> counts;
  for (char c : value) ++counts[c];
  double h = 0.0;
  for (const auto& [c, n] : counts) {
    double p = static_cast<double>(n) / value.size();
    h -= p * std::log2(p);
  }
  return h;
}

std::optional<TimestampPattern> find_timestamp(std::string_view value, Timestamp near) {
  auto check = [&](std::string_view digits) -> std::optional<bool> {
    if (!all_digits(digits) || (digits.size() != 10 && digits.size() != 13)) return std::nullopt;
    bool millis = digits.size() == 13;
    std::int64_t v = std::stoll(std::string(digits));
    std::int64_t secs = millis ? v / 1000 : v;
    std::int64_t delta = secs - near.time_since_epoch().count();
    if (std::llabs(delta) > kTimestampWindow.count()) return std::nullopt;
    return millis;
  };
  std::size_t i = 0;
  while (i < value.size()) {
    std::size_t j = i;
    while (j < value.size() && std::isalnum(static_cast<unsigned char>(value[j]))) ++j;
    if (j > i) {
      if (auto millis = check(value.substr(i, j - i))) {
        return TimestampPattern{std::string(value.substr(0, i)), std::string(value.substr(j)),
                                *millis};
      }
    }
    i = j + 1;
  }
  return std::nullopt;
}

std::optional<std::string> sensitive_base64_payload(std::string_view value) {
  if (value.size() < 8) return std::nullopt;
  auto decoded = base64_decode(value);
  if (!decoded || decoded->empty()) return std::nullopt;
  std::size_t printable = 0;
  for (auto b : *decoded) {
    if ((b >= 0x20 && b < 0x7f) || b == '\t' || b == '\n' || b == '\r') ++printable;
  }
  if (printable < kPrintableRatio * decoded->size()) return std::nullopt;
  std::string text = to_string(*decoded);
  static const std::regex kIpv4(R"((^|[^0-9])(\d{1,3}\.){3}\d{1,3}([^0-9]|$))");
  static const std::regex kIsoDate(R"(\d{4}-\d{2}-\d{2})");
  static const std::regex kOtp(R"((^|[^0-9])\d{6}([^0-9]|$))");
  if (std::regex_search(text, kIpv4) || std::regex_search(text, kIsoDate) ||
      std::regex_search(text, kOtp)) {
    return text;
  }
  return std::nullopt;
}

ValueAnalysis analyze_value_scheme(std::span<const TrustCookieSet> sets,
                                   std::span<const Timestamp> login_times) {
  if (sets.size() < 4 || login_times.size() < 4) {
    throw Error(ErrorCode::kInsufficientSets, "need four trust sets with login times");
  }
  for (const auto& s : sets.first(4)) {
    if (s.empty()) throw Error(ErrorCode::kInsufficientSets, "a trust set is empty");
  }
  ValueAnalysis out;
  std::set<FlawKind> seen;
  auto add = [&](DesignFlaw f) {
    if (seen.insert(f.kind).second) out.flaws.push_back(std::move(f));
  };

  // Cookies are matched across sets by name.
  std::map<std::string, std::array<const CookieRecord*, 4>> by_name;
  for (std::size_t i = 0; i < 4; ++i) {
    for (const auto& r : sets[i].records) {
      if (!sets[i].keys.count(r.key())) continue;
      by_name[r.name][i] = &r;
    }
  }

  for (const auto& [name, recs] : by_name) {
    bool complete = std::all_of(recs.begin(), recs.end(), [](const CookieRecord* r) { return r; });
    bool timestamp_derived = false;
    for (std::size_t i = 0; i < 4; ++i) {
      if (!recs[i]) continue;
      const auto& v = recs[i]->value;
      if (auto ts = find_timestamp(v, login_times[i])) {
        timestamp_derived = true;
        add({FlawKind::kPredictableTimestamp,
             name + "=" + v + " is epoch " + (ts->millis ? "milliseconds" : "seconds") +
                 " near login time",
             recs[i]->key(), v, ts});
      }
      if (auto payload = sensitive_base64_payload(v)) {
        add({FlawKind::kSensitiveEncoding, name + " decodes to " + *payload, recs[i]->key(), v,
             std::nullopt});
      }
      if (shannon_entropy(v) < kLowEntropyBits) {
        std::string w = "LowEntropy: " + name;
        if (std::find(out.warnings.begin(), out.warnings.end(), w) == out.warnings.end()) {
          out.warnings.push_back(w);
        }
      }
    }
    // Two timestamp cookies minted in the same second are equal without
    // being fixed.
    if (!complete || timestamp_derived) continue;
    const auto& v0 = recs[0]->value;
    bool victim_constant = v0 == recs[1]->value;
    bool attacker_constant = recs[2]->value == recs[3]->value;
    if (victim_constant && attacker_constant) {
      add({FlawKind::kFixedValue, name + " is identical across logins", recs[0]->key(), v0,
           std::nullopt});
      if (v0 == recs[2]->value) {
        add({FlawKind::kCrossAccountReuse, name + " is identical across accounts", recs[0]->key(),
             v0, std::nullopt});
      }
    }
  }
  return out;
}

CookieRecord forge_cookie_value(const DesignFlaw& flaw, const CookieRecord& templ, TimePoint now) {
  CookieRecord out = templ;
  Timestamp now_s = to_timestamp(now);
  if (templ.expires_at) out.expires_at = now_s + (*templ.expires_at - templ.created_at);
  out.created_at = now_s;
  switch (flaw.kind) {
    case FlawKind::kPredictableTimestamp: {
      if (!flaw.timestamp) throw Error(ErrorCode::kUnforgeable, "no timestamp pattern recorded");
      auto ms = now.time_since_epoch().count();
      auto v = flaw.timestamp->millis ? ms : ms / 1000;
      out.value = flaw.timestamp->prefix + std::to_string(v) + flaw.timestamp->suffix;
      return out;
    }
    case FlawKind::kFixedValue:
    case FlawKind::kCrossAccountReuse:
      if (!flaw.observed_value) throw Error(ErrorCode::kUnforgeable, "no observed constant");
      out.value = *flaw.observed_value;
      return out;
    default:
      throw Error(ErrorCode::kUnforgeable,
                  std::string(flaw_name(flaw.kind)) + " gives no way to mint a value");
  }
}

bool detect_broken_2fa(std::span<const FlowResult> logins, std::vector<std::string>* notes) {
  std::size_t total = 0, prompted = 0;
  for (const auto& r : logins) {
    for (const auto& p : r.prompts) {
      ++total;
      if (p.prompted) ++prompted;
    }
  }
  if (total < 3) {
    if (notes) notes->push_back("broken-2FA check needs at least 3 logins");
    return false;
  }
  if (prompted > 0 && prompted < total && notes) {
    notes->push_back("intermittent 2FA prompt: " + std::to_string(prompted) + " of " +
                     std::to_string(total) + " fresh logins prompted");
  }
  return prompted == 0;
}

std::string_view bucket_name(ExpiryBucket b) {
  switch (b) {
    case ExpiryBucket::kUpTo7: return "<=7";
    case ExpiryBucket::k8To29: return "8-29";
    case ExpiryBucket::k30: return "30";
    case ExpiryBucket::k31To364: return "31-364";
    case ExpiryBucket::k365Plus: return ">=365";
    case ExpiryBucket::kSession: return "Session";
  }
  return "?";
}

ExpiryBucket bucket_for_days(int days) {
  if (days <= 7) return ExpiryBucket::kUpTo7;
  if (days < 30) return ExpiryBucket::k8To29;
  if (days == 30) return ExpiryBucket::k30;
  if (days < 365) return ExpiryBucket::k31To364;
  return ExpiryBucket::k365Plus;
}

namespace {
ExpiryAudit audit_from_days(const std::vector<std::optional<int>>& days) {
  ExpiryAudit out;
  for (const auto& d : days) {
    if (d && (!out.max_lifetime_days || *d > *out.max_lifetime_days)) out.max_lifetime_days = d;
  }
  out.bucket = out.max_lifetime_days ? bucket_for_days(*out.max_lifetime_days) : ExpiryBucket::kSession;
  return out;
}
}  // namespace

ExpiryAudit audit_expiry(const TrustCookieSet& trust) {
  std::vector<std::optional<int>> days;
  for (const auto& r : trust.records) {
    if (trust.keys.count(r.key())) days.push_back(lifetime_days(r));
  }
  return audit_from_days(days);
}

ExpiryAudit audit_expiry(const TrustCookieAudit& audit) {
  std::vector<std::optional<int>> days;
  for (const auto& c : audit.per_cookie) days.push_back(c.lifetime_days);
  return audit_from_days(days);
}

}  // namespace se2fa
