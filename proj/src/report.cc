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

#include "se2fa/report.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "se2fa/error.h"

namespace se2fa {
namespace {

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string md_cell(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out;
}

bool is_broken(const EvaluationVerdict& v) { return v.audit.has_flaw(FlawKind::kBroken2fa); }

}  // namespace

std::string_view group_name(SiteGroup g) {
  switch (g) {
    case SiteGroup::kG1: return "G1";
    case SiteGroup::kG2CookieOnly: return "G2CookieOnly";
    case SiteGroup::kG2Other: return "G2Other";
    case SiteGroup::kG3: return "G3";
    case SiteGroup::kG4: return "G4";
    case SiteGroup::kG5: return "G5";
  }
  return "?";
}

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> kMethods = {
      "SMS",     "PhoneCall",        "SpecificApp", "HardwareToken", "Email",
      "Passkey", "AuthenticatorApp", "Biometrics",  "RecoveryCode"};
  return kMethods;
}

SiteRecord site_from_json(const Json& j, std::size_t index) {
  SiteRecord s;
  try {
    s.domain = j.at("domain").get<std::string>();
    if (j.contains("rank") && !j["rank"].is_null()) s.rank = j["rank"].get<int>();
    s.registrable = j.value("registrable", true);
    s.requires_third_party = j.value("requiresThirdParty", false);
    s.supports2fa = j.value("supports2fa", true);
    s.can_enable2fa = j.value("canEnable2fa", true);
    s.has_remember_device = j.value("hasRememberDevice", false);
    if (j.contains("cookieOnly") && !j["cookieOnly"].is_null()) {
      s.cookie_only = j["cookieOnly"].get<bool>();
    }
    for (const auto& m : j.value("methods", Json::array())) {
      auto name = m.get<std::string>();
      const auto& known = known_methods();
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        throw Error(ErrorCode::kFormatError, "unknown method " + name, index);
      }
      s.methods.push_back(name);
    }
    if (j.contains("verdict") && !j["verdict"].is_null()) {
      s.verdict = verdict_from_json(j["verdict"]);
      if (s.verdict->target.empty()) s.verdict->target = s.domain;
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("site record: ") + e.what(), index);
  }
  return s;
}

Json site_to_json(const SiteRecord& s) {
  Json j{{"domain", s.domain},
         {"rank", s.rank ? Json(*s.rank) : Json(nullptr)},
         {"registrable", s.registrable},
         {"requiresThirdParty", s.requires_third_party},
         {"supports2fa", s.supports2fa},
         {"canEnable2fa", s.can_enable2fa},
         {"hasRememberDevice", s.has_remember_device},
         {"cookieOnly", s.cookie_only ? Json(*s.cookie_only) : Json(nullptr)},
         {"methods", s.methods},
         {"verdict", s.verdict ? verdict_to_json(*s.verdict) : Json(nullptr)}};
  return j;
}

std::vector<SiteRecord> load_sites(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFormatError, "cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormatError, path + ": " + e.what());
  }
  const Json& list = j.is_array() ? j : j.at("sites");
  std::vector<SiteRecord> out;
  for (std::size_t i = 0; i < list.size(); ++i) out.push_back(site_from_json(list[i], i));
  return out;
}

SiteGroup classify_group(const SiteRecord& r) {
  if (!r.supports2fa) throw Error(ErrorCode::kUnclassifiable, r.domain + " has no 2FA");
  if (!r.registrable) return SiteGroup::kG4;
  if (r.requires_third_party) return SiteGroup::kG3;
  if (!r.can_enable2fa) return SiteGroup::kG5;
  if (!r.has_remember_device) return SiteGroup::kG1;
  return r.cookie_only.value_or(false) ? SiteGroup::kG2CookieOnly : SiteGroup::kG2Other;
}

AggregateStats aggregate_stats(const std::vector<SiteRecord>& records) {
  AggregateStats s;
  for (const auto& r : records) {
    if (!r.supports2fa) continue;
    auto g = classify_group(r);
    ++s.groups[g];
    if (g == SiteGroup::kG2CookieOnly) ++s.cookie_only;
    if (g == SiteGroup::kG2CookieOnly || g == SiteGroup::kG2Other) ++s.with_remember;
    if (r.rank && *r.rank >= 1) ++s.rank_buckets[(*r.rank - 1) / 1000];

    s.methods_per_site[r.methods.size()] += r.methods.empty() ? 0 : 1;
    for (const auto& m : r.methods) {
      ++s.method_totals[m];
      ++s.method_by_count[m][r.methods.size()];
    }

    if (!r.verdict) continue;
    const auto& v = *r.verdict;
    if (v.notification) ++s.notifications[*v.notification];
    for (auto f : v.audit.flaw_kinds()) ++s.flaws[f];
    const auto& cs = v.audit.per_cookie;
    if (cs.empty()) continue;
    auto e = audit_expiry(v.audit);
    ++s.expiry_buckets[e.bucket];
    if (e.max_lifetime_days) {
      int d = *e.max_lifetime_days;
      ++s.expiry_days[d];
      if (d <= 7) ++s.expiry_up_to_7;
      if (d == 30) ++s.expiry_30;
      if (d == 400) ++s.expiry_400;
    }
    if (std::none_of(cs.begin(), cs.end(), [](const CookieAudit& c) { return c.http_only; })) {
      ++s.missing_http_only;
    }
    if (std::none_of(cs.begin(), cs.end(), [](const CookieAudit& c) { return c.secure; })) {
      ++s.missing_secure;
    }
  }
  std::erase_if(s.methods_per_site, [](const auto& kv) { return kv.second == 0; });
  // Ties go to the shorter lifetime.
  std::size_t best = 0;
  for (const auto& [days, n] : s.expiry_days) {
    if (n > best) {
      best = n;
      s.modal_expiry_days = days;
    }
  }
  return s;
}

Json stats_to_json(const AggregateStats& s) {
  Json groups = Json::object();
  for (const auto& [g, n] : s.groups) groups[std::string(group_name(g))] = n;
  Json buckets = Json::object();
  for (const auto& [b, n] : s.expiry_buckets) buckets[std::string(bucket_name(b))] = n;
  Json days = Json::object();
  for (const auto& [d, n] : s.expiry_days) days[std::to_string(d)] = n;
  Json flaws = Json::object();
  for (const auto& [f, n] : s.flaws) flaws[std::string(flaw_name(f))] = n;
  Json ranks = Json::array();
  for (const auto& [b, n] : s.rank_buckets) {
    ranks.push_back({{"from", b * 1000 + 1}, {"to", (b + 1) * 1000}, {"sites", n}});
  }
  Json methods = Json::object();
  for (const auto& m : known_methods()) {
    auto it = s.method_totals.find(m);
    if (it == s.method_totals.end()) continue;
    Json by = Json::object();
    for (const auto& [k, n] : s.method_by_count.at(m)) by[std::to_string(k)] = n;
    methods[m] = {{"total", it->second}, {"byMethodCount", by}};
  }
  Json per_site = Json::object();
  for (const auto& [k, n] : s.methods_per_site) per_site[std::to_string(k)] = n;
  Json notes = Json::object();
  for (const auto& [t, n] : s.notifications) notes[std::string(notification_name(t))] = n;
  return Json{{"groups", groups},
              {"cookieOnly", s.cookie_only},
              {"withRememberDevice", s.with_remember},
              {"cookieOnlyFraction", s.cookie_only_fraction()},
              {"expiry",
               {{"buckets", buckets},
                {"days", days},
                {"upTo7Days", s.expiry_up_to_7},
                {"exactly30Days", s.expiry_30},
                {"exactly400Days", s.expiry_400},
                {"modalDays", s.modal_expiry_days ? Json(*s.modal_expiry_days) : Json(nullptr)}}},
              {"missingHttpOnly", s.missing_http_only},
              {"missingSecure", s.missing_secure},
              {"flaws", flaws},
              {"rankBuckets", ranks},
              {"methods", methods},
              {"methodsPerSite", per_site},
              {"notifications", notes}};
}

ReportFormat report_format_from_name(std::string_view name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "md") return ReportFormat::kMd;
  throw Error(ErrorCode::kUnsupportedFormat, "unsupported report format " + std::string(name));
}

std::vector<std::string> report_columns() {
  return {"No.", "Website", "Amount", "HTTPOnly", "Secure", "Expiries (days)", "Design Flaws",
          "Attack Type"};
}

std::vector<std::vector<std::string>> report_cells(std::vector<ReportEntry> entries) {
  std::stable_sort(entries.begin(), entries.end(), [](const ReportEntry& a, const ReportEntry& b) {
    // Unranked entries sort after ranked ones.
    auto ra = a.rank.value_or(std::numeric_limits<int>::max());
    auto rb = b.rank.value_or(std::numeric_limits<int>::max());
    if (ra != rb) return ra < rb;
    return a.website < b.website;
  });
  std::vector<std::vector<std::string>> rows;
  int no = 0;
  for (const auto& e : entries) {
    const auto& v = e.verdict;
    const auto& cs = v.audit.per_cookie;
    std::vector<std::string> row;
    row.push_back(std::to_string(++no));
    row.push_back(e.website);
    if (cs.empty()) {
      row.insert(row.end(), {"-", "-", "-", "-"});
    } else {
      bool http_only = std::any_of(cs.begin(), cs.end(), [](const CookieAudit& c) { return c.http_only; });
      bool secure = std::any_of(cs.begin(), cs.end(), [](const CookieAudit& c) { return c.secure; });
      auto exp = audit_expiry(v.audit);
      row.push_back(std::to_string(cs.size()));
      row.push_back(http_only ? "Yes" : "No");
      row.push_back(secure ? "Yes" : "No");
      row.push_back(exp.max_lifetime_days ? std::to_string(*exp.max_lifetime_days) : "Session");
    }
    std::vector<std::string> flaws;
    for (auto f : v.audit.flaw_kinds()) flaws.emplace_back(flaw_name(f));
    if (v.audit.uses_local_storage) flaws.insert(flaws.begin(), "localStorage");
    row.push_back(flaws.empty() ? "-" : join(flaws, ", "));
    std::vector<std::string> attacks;
    for (auto a : v.attacks) attacks.emplace_back(attack_name(a));
    row.push_back(attacks.empty() ? "-" : join(attacks, ", "));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string render_report(std::vector<ReportEntry> entries, ReportFormat format) {
  auto cols = report_columns();
  if (format == ReportFormat::kJson) {
    auto cells = report_cells(entries);
    Json rows = Json::array();
    for (const auto& r : cells) {
      Json row = Json::object();
      for (std::size_t i = 0; i < cols.size(); ++i) row[cols[i]] = r[i];
      rows.push_back(std::move(row));
    }
    return Json{{"columns", cols}, {"rows", rows}}.dump(2) + "\n";
  }
  auto cells = report_cells(std::move(entries));
  std::ostringstream out;
  if (format == ReportFormat::kCsv) {
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_cell(r[i]);
      out << "\r\n";
    };
    line(cols);
    for (const auto& r : cells) line(r);
  } else {
    auto line = [&](const std::vector<std::string>& r) {
      out << "|";
      for (const auto& c : r) out << " " << md_cell(c) << " |";
      out << "\n";
    };
    line(cols);
    out << "|";
    for (std::size_t i = 0; i < cols.size(); ++i) out << "---|";
    out << "\n";
    for (const auto& r : cells) line(r);
  }
  return out.str();
}

std::vector<Recommendation> recommend_mitigations(const EvaluationVerdict& v) {
  std::vector<Recommendation> out;
  const auto& cs = v.audit.per_cookie;
  bool broken = is_broken(v);
  for (const auto& c : cs) {
    if (!c.secure) {
      out.push_back({"SetSecure", "set Secure on trust cookies so they never travel over plain HTTP"});
      break;
    }
  }
  for (const auto& c : cs) {
    if (!c.http_only) {
      out.push_back({"SetHttpOnly", "set HttpOnly on trust cookies so page scripts cannot read them"});
      break;
    }
  }
  auto exp = audit_expiry(v.audit);
  if (!cs.empty() && exp.max_lifetime_days && *exp.max_lifetime_days > 7) {
    out.push_back({"ShortenExpiry", "trust lasts " + std::to_string(*exp.max_lifetime_days) +
                                        " days; keep it to 7 days or less"});
  }
  if (!broken && (v.audit.cookie_only || (v.audit.uses_local_storage && !v.measures.fingerprint_based &&
                                          !v.measures.ip_based))) {
    out.push_back({"AddRiskFactors",
                   "combine the trust token with browser fingerprint, IP or geolocation and "
                   "behavioral signals"});
  }
  if (v.remember_device && !broken && v.notification_probed && !v.notification) {
    out.push_back({"EnableNotifications", "alert the account owner on new or unusual logins"});
  }
  for (auto f : v.audit.flaw_kinds()) {
    std::string detail;
    switch (f) {
      case FlawKind::kCrossAccountReuse: detail = "bind trust tokens to the account that earned them"; break;
      case FlawKind::kFixedValue: detail = "mint a fresh random token per trusted device"; break;
      case FlawKind::kPredictableTimestamp: detail = "replace timestamp values with random or signed tokens"; break;
      case FlawKind::kSensitiveEncoding: detail = "do not store profile data in the cookie; use an opaque or encrypted token"; break;
      case FlawKind::kBroken2fa: detail = "enforce the second factor on every untrusted login"; break;
    }
    out.push_back({"FixLogic(" + std::string(flaw_name(f)) + ")", detail});
  }
  return out;
}

Json recommendations_to_json(const std::vector<Recommendation>& r) {
  Json out = Json::array();
  for (const auto& x : r) out.push_back({{"kind", x.kind}, {"detail", x.detail}});
  return out;
}

}  // namespace se2fa
