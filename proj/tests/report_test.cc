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

#include <random>

#include <gtest/gtest.h>

#include "oracles/site_table.h"
#include "se2fa/error.h"
#include "test_support.h"

namespace se2fa {
namespace {

using testing::fixture;

CookieAudit cookie(std::string name, bool secure, bool http_only, std::optional<int> days) {
  return {CookieKey{std::move(name), "", "/"}, secure, http_only, days};
}

EvaluationVerdict verdict(std::vector<CookieAudit> cookies, std::vector<FlawKind> flaws = {},
                          bool cookie_only = true) {
  EvaluationVerdict v;
  v.target = "t";
  v.remember_device = true;
  v.measures.cookie_based = true;
  v.audit.cookie_only = cookie_only;
  v.audit.per_cookie = std::move(cookies);
  for (auto f : flaws) v.audit.flaws.push_back(DesignFlaw{f, "test", {}, {}, {}});
  v.attacks = classify_attack_surface(v.audit);
  v.notification_probed = true;
  v.notification = NotificationType::kN1;
  return v;
}

const std::vector<SiteRecord>& study_sites() {
  static const auto s = load_sites(fixture("study/sites.json"));
  return s;
}

SiteRecord site(bool supports, bool registrable, bool third_party, bool can_enable, bool remember,
                std::optional<bool> cookie_only) {
  SiteRecord r;
  r.domain = "x.example";
  r.supports2fa = supports;
  r.registrable = registrable;
  r.requires_third_party = third_party;
  r.can_enable2fa = can_enable;
  r.has_remember_device = remember;
  r.cookie_only = cookie_only;
  return r;
}

TEST(ClassifyGroup, Examples) {
  EXPECT_EQ(classify_group(site(true, true, false, true, false, {})), SiteGroup::kG1);
  EXPECT_EQ(classify_group(site(true, true, false, true, true, true)), SiteGroup::kG2CookieOnly);
  EXPECT_EQ(classify_group(site(true, true, false, true, true, false)), SiteGroup::kG2Other);
  EXPECT_EQ(classify_group(site(true, true, true, true, true, true)), SiteGroup::kG3);
  EXPECT_EQ(classify_group(site(true, false, true, true, true, true)), SiteGroup::kG4);
  EXPECT_EQ(classify_group(site(true, true, false, false, false, {})), SiteGroup::kG5);
  try {
    classify_group(site(false, true, false, true, false, {}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnclassifiable);
  }
}

// Independent restatement: a site can be audited only if every earlier
// gate passes, and lands in the group of the first gate it fails.
SiteGroup group_oracle(const SiteRecord& r) {
  const std::pair<bool, SiteGroup> gates[] = {
      {r.registrable, SiteGroup::kG4},
      {!r.requires_third_party, SiteGroup::kG3},
      {r.can_enable2fa, SiteGroup::kG5},
      {r.has_remember_device, SiteGroup::kG1},
      {r.cookie_only == true, SiteGroup::kG2Other},
  };
  for (const auto& [ok, g] : gates) {
    if (!ok) return g;
  }
  return SiteGroup::kG2CookieOnly;
}

TEST(ClassifyGroup, PartitionProperty) {
  std::mt19937 rng(7);
  std::bernoulli_distribution coin(0.5);
  std::vector<SiteRecord> records;
  for (int i = 0; i < 2000; ++i) {
    std::optional<bool> co;
    if (coin(rng)) co = coin(rng);
    auto r = site(coin(rng) || coin(rng), coin(rng) || coin(rng), coin(rng) && coin(rng), coin(rng) || coin(rng),
                  coin(rng), co);
    if (r.supports2fa) {
      EXPECT_EQ(classify_group(r), group_oracle(r));
    }
    records.push_back(r);
  }
  auto stats = aggregate_stats(records);
  std::size_t total = 0;
  for (const auto& [g, n] : stats.groups) total += n;
  auto with_2fa = std::count_if(records.begin(), records.end(), [](const SiteRecord& r) { return r.supports2fa; });
  EXPECT_EQ(total, static_cast<std::size_t>(with_2fa));
  EXPECT_LE(stats.cookie_only, stats.with_remember);
  EXPECT_EQ(stats.with_remember, stats.groups[SiteGroup::kG2CookieOnly] + stats.groups[SiteGroup::kG2Other]);
}

TEST(AggregateStats, StudyFixture) {
  auto s = aggregate_stats(study_sites());
  EXPECT_EQ(s.groups[SiteGroup::kG1], 227u);
  EXPECT_EQ(s.groups[SiteGroup::kG2CookieOnly], 93u);
  EXPECT_EQ(s.groups[SiteGroup::kG2Other], 87u);
  EXPECT_EQ(s.groups[SiteGroup::kG3], 62u);
  EXPECT_EQ(s.groups[SiteGroup::kG4], 430u);
  EXPECT_EQ(s.groups[SiteGroup::kG5], 11u);
  EXPECT_EQ(s.cookie_only, 93u);
  EXPECT_EQ(s.with_remember, 180u);
  EXPECT_NEAR(s.cookie_only_fraction(), 0.5167, 5e-4);

  // Hand-counted from the transcribed per-site rows.
  EXPECT_EQ(s.expiry_up_to_7, 9u);
  EXPECT_EQ(s.expiry_30, 30u);
  ASSERT_TRUE(s.modal_expiry_days);
  EXPECT_EQ(*s.modal_expiry_days, 30);
  // The published summary says 14 sites cap at 400 days; the rows give 15.
  EXPECT_NEAR(static_cast<double>(s.expiry_400), 14.0, 1.0);
  EXPECT_EQ(s.expiry_400, 15u);
  EXPECT_EQ(s.expiry_buckets[ExpiryBucket::kSession], 3u);
  EXPECT_EQ(s.missing_http_only, 11u);
  EXPECT_EQ(s.missing_secure, 8u);
  EXPECT_EQ(s.flaws[FlawKind::kCrossAccountReuse], 1u);
  EXPECT_EQ(s.flaws[FlawKind::kPredictableTimestamp], 2u);
  EXPECT_EQ(s.flaws[FlawKind::kBroken2fa], 2u);
}

TEST(AggregateStats, MethodsMatchTranscribedCounts) {
  auto s = aggregate_stats(study_sites());
  auto tm = oracle::load_json_file(fixture("study/methods.json"));
  for (const auto& m : tm.at("methods")) {
    auto name = m.at("method").get<std::string>();
    SCOPED_TRACE(name);
    EXPECT_EQ(s.method_totals[name], m.at("total").get<std::size_t>());
    for (std::size_t k = 1; k <= 5; ++k) {
      EXPECT_EQ(s.method_by_count[name][k], m.at("byCount").at(k - 1).get<std::size_t>());
    }
  }
  EXPECT_EQ(s.method_totals["AuthenticatorApp"], 650u);
  EXPECT_EQ(s.method_totals["SMS"], 330u);
}

TEST(AggregateStats, NotificationsMatchTranscribedCounts) {
  auto s = aggregate_stats(study_sites());
  auto tn = oracle::load_json_file(fixture("study/notifications.json"));
  for (const auto& n : tn.at("notifications")) {
    auto t = notification_from_name(n.at("type").get<std::string>());
    ASSERT_TRUE(t);
    EXPECT_EQ(s.notifications[*t], n.at("number").get<std::size_t>());
  }
}

TEST(AggregateStats, ModalTiesGoShorter) {
  std::vector<SiteRecord> rs;
  for (int d : {60, 14, 60, 14, 5}) {
    auto r = site(true, true, false, true, true, true);
    r.verdict = verdict({cookie("c", true, true, d)});
    rs.push_back(r);
  }
  auto s = aggregate_stats(rs);
  ASSERT_TRUE(s.modal_expiry_days);
  EXPECT_EQ(*s.modal_expiry_days, 14);
  EXPECT_EQ(s.expiry_up_to_7, 1u);
}

TEST(TableReproduction, RowsMatchStoredAudits) {
  auto rows = oracle::load_table_rows(fixture("study/audited_sites.json"));
  ASSERT_EQ(rows.size(), 95u);
  auto bad = oracle::table_mismatches(rows, study_sites());
  for (const auto& b : bad) ADD_FAILURE() << b;
  EXPECT_TRUE(bad.empty());
}

TEST(TableReproduction, OracleNoticesTampering) {
  auto rows = oracle::load_table_rows(fixture("study/audited_sites.json"));
  auto sites = study_sites();
  for (auto& s : sites) {
    if (s.domain == rows[0].website) s.verdict->audit.per_cookie[0].secure = false;
  }
  auto bad = oracle::table_mismatches(rows, sites);
  ASSERT_EQ(bad.size(), 2u);  // Secure column and the A1 it now allows.
}

TEST(RenderReport, MarkdownGolden) {
  std::vector<ReportEntry> es = {{"a.example", 3, verdict({cookie("t", true, true, 30)})}};
  EXPECT_EQ(render_report(es, ReportFormat::kMd),
            "| No. | Website | Amount | HTTPOnly | Secure | Expiries (days) | Design Flaws | Attack Type |\n"
            "|---|---|---|---|---|---|---|---|\n"
            "| 1 | a.example | 1 | Yes | Yes | 30 | - | A3 |\n");
}

TEST(RenderReport, EmptyIsHeaderOnly) {
  EXPECT_EQ(render_report({}, ReportFormat::kCsv),
            "No.,Website,Amount,HTTPOnly,Secure,Expiries (days),Design Flaws,Attack Type\r\n");
  auto md = render_report({}, ReportFormat::kMd);
  EXPECT_EQ(std::count(md.begin(), md.end(), '\n'), 2);
  auto j = Json::parse(render_report({}, ReportFormat::kJson));
  EXPECT_TRUE(j.at("rows").empty());
  EXPECT_EQ(j.at("columns").size(), 8u);
}

TEST(RenderReport, FormatsAgreeAndSortByRank) {
  std::vector<ReportEntry> es = {
      {"z.example", std::nullopt, verdict({cookie("t", false, false, std::nullopt)})},
      {"b.example", 20, verdict({cookie("t", true, true, 400), cookie("u", true, false, 7)},
                                {FlawKind::kPredictableTimestamp})},
      {"a.example", 20, verdict({cookie("t", true, true, 1)})},
  };
  auto j = Json::parse(render_report(es, ReportFormat::kJson));
  auto csv = render_report(es, ReportFormat::kCsv);
  auto md = render_report(es, ReportFormat::kMd);
  const auto& rows = j.at("rows");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].at("Website"), "a.example");
  EXPECT_EQ(rows[1].at("Website"), "b.example");
  EXPECT_EQ(rows[2].at("Website"), "z.example");
  EXPECT_EQ(rows[1].at("Expiries (days)"), "400");
  EXPECT_EQ(rows[1].at("Design Flaws"), "PredictableTimestamp");
  EXPECT_EQ(rows[1].at("Attack Type"), "A3, A4");
  EXPECT_EQ(rows[2].at("Expiries (days)"), "Session");
  EXPECT_EQ(rows[2].at("Attack Type"), "A1, A2, A3");
  // Every cell shows up in the csv and md renderings, on the same line.
  std::istringstream cl(csv), ml(md);
  std::string c, m;
  std::getline(cl, c);
  std::getline(ml, m);
  std::getline(ml, m);
  for (const auto& row : rows) {
    std::getline(cl, c);
    std::getline(ml, m);
    for (const auto& [k, v] : row.items()) {
      auto cell = v.get<std::string>();
      EXPECT_NE(m.find("| " + cell + " |"), std::string::npos) << m;
      auto quoted = cell.find(',') == std::string::npos ? cell : "\"" + cell + "\"";
      EXPECT_NE(c.find(quoted), std::string::npos) << c;
    }
  }
  EXPECT_EQ(render_report(es, ReportFormat::kMd), md);
}

TEST(RenderReport, FormatNames) {
  EXPECT_EQ(report_format_from_name("json"), ReportFormat::kJson);
  EXPECT_EQ(report_format_from_name("csv"), ReportFormat::kCsv);
  EXPECT_EQ(report_format_from_name("md"), ReportFormat::kMd);
  try {
    report_format_from_name("xlsx");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupportedFormat);
  }
}

std::vector<std::string> kinds(const std::vector<Recommendation>& rs) {
  std::vector<std::string> out;
  for (const auto& r : rs) out.push_back(r.kind);
  return out;
}

TEST(Mitigations, Examples) {
  EXPECT_EQ(kinds(recommend_mitigations(verdict({cookie("t", true, true, 365)}))),
            (std::vector<std::string>{"ShortenExpiry", "AddRiskFactors"}));
  EXPECT_EQ(kinds(recommend_mitigations(verdict({cookie("t", false, false, 7)}))),
            (std::vector<std::string>{"SetSecure", "SetHttpOnly", "AddRiskFactors"}));
  EXPECT_EQ(kinds(recommend_mitigations(verdict({cookie("t", true, true, 5)}, {}, false))),
            std::vector<std::string>{});

  EvaluationVerdict broken;
  broken.audit.flaws.push_back(DesignFlaw{FlawKind::kBroken2fa, "test", {}, {}, {}});
  broken.attacks = {AttackType::kA4};
  EXPECT_EQ(kinds(recommend_mitigations(broken)), std::vector<std::string>{"FixLogic(Broken2FA)"});

  auto quiet = verdict({cookie("t", true, true, 3)}, {FlawKind::kCrossAccountReuse}, false);
  quiet.notification.reset();
  EXPECT_EQ(kinds(recommend_mitigations(quiet)),
            (std::vector<std::string>{"EnableNotifications", "FixLogic(CrossAccountReuse)"}));
  auto j = recommendations_to_json(recommend_mitigations(quiet));
  EXPECT_EQ(j.at(0).at("kind"), "EnableNotifications");
  EXPECT_FALSE(j.at(0).at("detail").get<std::string>().empty());
}

TEST(Sites, JsonRoundTrip) {
  for (std::size_t i = 0; i < study_sites().size(); i += 37) {
    const auto& s = study_sites()[i];
    EXPECT_EQ(site_to_json(site_from_json(site_to_json(s))), site_to_json(s));
  }
  try {
    site_from_json(Json{{"rank", 1}}, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.index(), std::optional<std::size_t>(4));
  }
}

}  // namespace
}  // namespace se2fa
