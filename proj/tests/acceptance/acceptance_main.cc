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


// One PASS/FAIL line per release criterion. Exit status is nonzero when any
// criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/cookie_gen.h"
#include "oracles/min_subset.h"
#include "oracles/site_table.h"
#include "se2fa/attack_eval.h"
#include "se2fa/clock.h"
#include "se2fa/cookie.h"
#include "se2fa/encoding.h"
#include "se2fa/error.h"
#include "se2fa/evaluator.h"
#include "se2fa/report.h"
#include "se2fa/risk_probe.h"
#include "se2fa/spider.h"
#include "se2fa/testbed.h"
#include "se2fa/time_util.h"
#include "se2fa/totp.h"
#include "test_support.h"

namespace se2fa {
namespace {

namespace fs = std::filesystem;
using std::chrono::seconds;
using testing::attacker;
using testing::fixture;
using testing::LiveTarget;
using testing::matrix;
using testing::matrix_config;
using testing::victim;

// Tolerances.
constexpr double kMatrixBudgetSeconds = 180.0;
constexpr double kDirectoryAccuracy = 0.79;
constexpr double kDirectoryAccuracyTol = 0.005;
constexpr std::size_t kPublished400Day = 14;
constexpr std::size_t kPublished400DayTol = 1;
constexpr int kMinimizationConfigs = 200;
constexpr int kTotpCases = 1000;
constexpr int kCookieCases = 1000;
constexpr int kFuzzInputs = 100000;
constexpr int kA4Trials = 5;

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (ok) return;
    if (pass) detail.clear();
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(SE2FA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// `se2fa evaluate` against every matrix target, compared field by field with
// the config's ground truth.
Outcome matrix_recovery() {
  Outcome o;
  auto start = std::chrono::steady_clock::now();
  auto configs = matrix();
  TestbedFleet fleet(configs, system_clock(), ServiceOptions{true, {}, {}});
  fleet.start("127.0.0.1", 0);
  auto dir = fs::temp_directory_path() / ("se2fa_accept_" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  int ok = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& c = configs[i];
    auto out = (dir / (c.id + ".json")).string();
    int rc = run_cli("evaluate --target " + fleet.at(i).base_url() + " --creds " + fixture("testbed/victim.json") +
                     " --creds2 " + fixture("testbed/attacker.json") + " --out " + out);
    if (rc != 0) {
      o.check(false, c.id + ": exit " + std::to_string(rc));
      continue;
    }
    auto v = verdict_from_json(Json::parse(slurp(out)));
    auto g = ground_truth(c);
    std::set<std::string> names;
    for (const auto& k : v.trust.keys) names.insert(k.name);
    std::vector<std::string> wrong;
    if (v.remember_device != g.remember_device) wrong.push_back("rememberDevice");
    if (measures_to_json(v.measures) != measures_to_json(g.measures)) wrong.push_back("measures");
    if (names != std::set<std::string>(g.trust_cookie_names.begin(), g.trust_cookie_names.end())) {
      wrong.push_back("trust cookies");
    }
    if (v.attacks != g.attacks) wrong.push_back("attacks");
    if (v.audit.flaw_kinds() != g.flaws) wrong.push_back("flaws");
    if (v.notification != g.notification) wrong.push_back("notification");
    if (wrong.empty()) {
      ++ok;
    } else {
      std::string w;
      for (const auto& x : wrong) w += (w.empty() ? "" : ",") + x;
      o.check(false, c.id + ": " + w);
    }
  }
  fleet.stop();
  fs::remove_all(dir);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.check(secs < kMatrixBudgetSeconds, "took " + std::to_string(secs) + " s");
  if (o.pass) {
    std::ostringstream d;
    d << ok << "/" << configs.size() << " verdicts equal ground truth in " << std::fixed
      << std::setprecision(1) << secs << " s";
    o.detail = d.str();
  } else {
    o.detail = std::to_string(ok) + "/" + std::to_string(configs.size()) + " " + o.detail;
  }
  return o;
}

Outcome table_reproduction() {
  Outcome o;
  auto rows = oracle::load_table_rows(fixture("study/audited_sites.json"));
  auto sites = load_sites(fixture("study/sites.json"));
  o.check(rows.size() == 95, "expected 95 rows, got " + std::to_string(rows.size()));
  // Attack columns alone, then every other column through the oracle.
  std::map<std::string, const SiteRecord*> by_domain;
  for (const auto& s : sites) by_domain[s.domain] = &s;
  int mismatches = 0, ls_ok = 0, broken_ok = 0;
  for (const auto& r : rows) {
    auto it = by_domain.find(r.website);
    if (it == by_domain.end() || !it->second->verdict) {
      ++mismatches;
      continue;
    }
    std::set<std::string> got;
    for (auto a : classify_attack_surface(it->second->verdict->audit)) got.emplace(attack_name(a));
    if (got != r.attacks) ++mismatches;
    if (r.marker == "local-storage" && got == std::set<std::string>{"A2", "A3"}) ++ls_ok;
    if (r.marker == "broken-2fa" && got == std::set<std::string>{"A4"}) ++broken_ok;
  }
  o.check(mismatches == 0, std::to_string(mismatches) + " attack-type mismatches");
  o.check(ls_ok == 1, "localStorage row");
  o.check(broken_ok == 2, "broken-2FA rows");
  auto other = oracle::table_mismatches(rows, sites);
  o.check(other.empty(), other.empty() ? "" : other.front());
  if (o.pass) o.detail = std::to_string(rows.size()) + " rows, 0 mismatches";
  return o;
}

Outcome aggregates() {
  Outcome o;
  auto s = aggregate_stats(load_sites(fixture("study/sites.json")));
  o.check(s.cookie_only == 93 && s.with_remember == 180,
          "cookie-only " + std::to_string(s.cookie_only) + "/" + std::to_string(s.with_remember));
  o.check(std::lround(100 * s.cookie_only_fraction()) == 52, "cookie-only percent");
  o.check(s.expiry_up_to_7 == 9, "<=7 days " + std::to_string(s.expiry_up_to_7));
  o.check(s.modal_expiry_days == 30, "modal expiry");
  // The fixture rows tally 15 sites at 400 days.
  std::size_t d400 = s.expiry_400;
  o.check(d400 == 15, "400-day tally " + std::to_string(d400));
  o.check(d400 + kPublished400DayTol >= kPublished400Day && d400 <= kPublished400Day + kPublished400DayTol,
          "400-day vs published count");
  const std::size_t want_n[] = {24, 12, 5, 2, 1, 1};
  for (int i = 0; i < 6; ++i) {
    auto t = static_cast<NotificationType>(i + 1);
    o.check(s.notifications[t] == want_n[i], std::string(notification_name(t)) + " count");
  }

  std::vector<SpiderVerdict> verdicts;
  auto vj = oracle::load_json_file(fixture("study/spider_verdicts.json"));
  for (const auto& v : vj.at("verdicts")) verdicts.push_back(spider_verdict_from_json(v));
  auto c = compare_with_baseline(verdicts, load_domain_list(fixture("study/directory.txt")));
  o.check(c.only_baseline == 112 && c.only_spider == 377 && c.intersection == 421,
          "directory sets " + std::to_string(c.only_baseline) + "/" + std::to_string(c.only_spider) + "/" +
              std::to_string(c.intersection));
  o.check(std::abs(c.accuracy - kDirectoryAccuracy) <= kDirectoryAccuracyTol, "accuracy " + std::to_string(c.accuracy));
  if (o.pass) {
    std::ostringstream d;
    d << "93/180 cookie-only, 9 <=7d, modal 30d, 400d=" << d400 << ", N1-N6 24/12/5/2/1/1, directory "
      << c.only_baseline << "/" << c.only_spider << "/" << c.intersection << " acc " << std::fixed
      << std::setprecision(3) << c.accuracy;
    o.detail = d.str();
  }
  return o;
}

TargetConfig random_config(std::mt19937& rng, int i) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  static const std::vector<std::string> pool = {"remember_token", "trusted_device", "mfa_ok", "dvc",
                                                "tfa_trust", "device_id", "auth_mark", "rdt"};
  static const std::vector<std::optional<std::int64_t>> ages = {std::nullopt, 7 * 86400, 30 * 86400,
                                                                 400 * 86400};
  TargetConfig c;
  c.id = "rand-" + std::to_string(i);
  c.accounts = matrix().front().accounts;
  c.risk_controls.cookie_based = true;
  c.risk_controls.fingerprint_based = pick(0, 3) == 0;
  c.risk_controls.ip_based = pick(0, 3) == 0;
  c.placement = pick(0, 4) == 0 ? RememberPlacement::kInSettings : RememberPlacement::kAtChallenge;
  int trust = pick(1, 3);
  c.decoy_cookies = pick(0, 6 - trust);
  auto names = pool;
  std::shuffle(names.begin(), names.end(), rng);
  for (int k = 0; k < trust; ++k) {
    TrustCookieSpec s;
    s.name = names[k];
    s.scheme = pick(0, 3) == 0 ? ValueScheme::kTimestampSeconds : ValueScheme::kRandom128;
    s.secure = pick(0, 1) == 1;
    s.http_only = pick(0, 1) == 1;
    s.max_age_seconds = ages[pick(0, ages.size() - 1)];
    c.trust_cookies.push_back(s);
  }
  c.validate();
  return c;
}

// Greedy isolation against exhaustive search over every subset of the
// victim's cookies.
Outcome minimization() {
  Outcome o;
  std::mt19937 rng(20240610);
  int agree = 0;
  for (int i = 0; i < kMinimizationConfigs; ++i) {
    auto c = random_config(rng, i);
    LiveTarget live(c);
    RiskProbe probe(live.target(), live.clock);
    try {
      if (!probe.probe_remember_device(victim())) {
        o.check(false, c.id + ": no remember option found");
        continue;
      }
      probe.begin_trial();
      SessionEnv v = probe.make_env(EnvRole::kVictim);
      SessionEnv a = probe.equalize(probe.make_env(EnvRole::kAttacker), v, {false, true, true, false});
      a.fingerprint = v.fingerprint;
      a.simulated_ip = v.simulated_ip;
      auto trust = probe.isolate_trust_cookies(victim(), v, a);
      std::vector<oracle::RawCookie> raw;
      auto jar = v.jar.snapshot("now", live.clock->now_seconds());
      for (const auto& r : jar.cookies()) raw.push_back({r.name, r.value});
      auto best = oracle::minimum_bypassing_subset(live.service->base_url(), raw, victim().username,
                                                   victim().password, v.fingerprint, v.simulated_ip);
      auto names = trust.names();
      if (best && best->unique && std::set<std::string>(names.begin(), names.end()) == best->names) {
        ++agree;
      } else {
        o.check(false, c.id + " disagrees");
      }
    } catch (const Error& e) {
      o.check(false, c.id + ": " + e.what());
    }
  }
  o.check(agree == kMinimizationConfigs, std::to_string(agree) + "/" + std::to_string(kMinimizationConfigs));
  if (o.pass) o.detail = std::to_string(agree) + "/" + std::to_string(kMinimizationConfigs) + " match the exhaustive minimum";
  return o;
}

Outcome totp() {
  Outcome o;
  // Computed with tests/oracles/totp_reference.py.
  struct Vector {
    std::int64_t t;
    const char* code;
  };
  const Vector vectors[] = {{59, "94287082"},         {1111111109, "07081804"}, {1111111111, "14050471"},
                            {1234567890, "89005924"}, {2000000000, "69279037"}, {20000000000, "65353130"}};
  auto seed = to_bytes("12345678901234567890");
  for (const auto& v : vectors) {
    o.check(totp_code(seed, Timestamp(seconds(v.t)), seconds(30), 8) == v.code, "vector t=" + std::to_string(v.t));
  }
  std::mt19937_64 rng(61238);
  std::uniform_int_distribution<std::int64_t> when(0, 4102444800);
  std::uniform_int_distribution<int> byte(0, 255);
  int held = 0;
  for (int i = 0; i < kTotpCases; ++i) {
    Bytes s(20);
    for (auto& b : s) b = static_cast<std::uint8_t>(byte(rng));
    std::int64_t t = when(rng);
    std::int64_t start = t - t % 30;
    auto code = totp_code(s, Timestamp(seconds(t)), seconds(30), 8);
    bool ok = code == totp_code(s, Timestamp(seconds(start)), seconds(30), 8) &&
              code == totp_code(s, Timestamp(seconds(start + 29)), seconds(30), 8) &&
              code == hotp_code(s, static_cast<std::uint64_t>(start / 30), 8);
    held += ok;
  }
  o.check(held == kTotpCases, "window property " + std::to_string(held) + "/" + std::to_string(kTotpCases));
  if (o.pass) o.detail = "6/6 vectors, window property " + std::to_string(held) + "/" + std::to_string(kTotpCases);
  return o;
}

Outcome cookie_layer() {
  Outcome o;
  oracle::Gen g(90210);
  int round_trips = 0, diffs = 0;
  for (int i = 0; i < kCookieCases; ++i) {
    CookieSnapshot s(g.token(0, 8), g.when(), g.unique_records(g.uniform(0, 60)));
    round_trips += parse_snapshot(serialize_snapshot(s)) == s;
  }
  for (int i = 0; i < kCookieCases; ++i) {
    auto pool = g.unique_records(g.uniform(0, 30));
    std::vector<CookieRecord> b, a;
    std::size_t added = 0, removed = 0, changed = 0;
    for (const auto& r : pool) {
      switch (g.uniform(0, 3)) {
        case 0: b.push_back(r); ++removed; break;
        case 1: a.push_back(r); ++added; break;
        case 2: b.push_back(r); a.push_back(r); break;
        default: {
          b.push_back(r);
          auto m = r;
          m.value += "~";
          a.push_back(m);
          ++changed;
        }
      }
    }
    CookieSnapshot before("b", g.when(), b), after("a", g.when(), a);
    auto d = diff_snapshots(before, after);
    diffs += d.added.size() == added && d.removed.size() == removed && d.changed.size() == changed &&
             apply_diff(before, d, "a", after.taken_at()) == after;
  }
  const Origin origin{"https", "example.test", "/p/q"};
  const std::string specials = std::string("=;, \t\"\r\n") + '\0' + "\x7f\xff.-/:";
  int crashes = 0;
  for (int i = 0; i < kFuzzInputs; ++i) {
    std::string s(g.uniform(0, 64), '\0');
    for (auto& c : s) {
      c = g.coin() ? specials[g.uniform(0, specials.size() - 1)] : static_cast<char>(g.uniform(0, 255));
    }
    if (g.coin()) s = "k=" + s;
    try {
      parse_set_cookie(s, origin, Timestamp{seconds{1718000000}});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kMalformedCookie && e.code() != ErrorCode::kForeignDomain) ++crashes;
    } catch (...) {
      ++crashes;
    }
  }
  o.check(round_trips == kCookieCases, "round-trip " + std::to_string(round_trips));
  o.check(diffs == kCookieCases, "diff " + std::to_string(diffs));
  o.check(crashes == 0, std::to_string(crashes) + " unexpected parser failures");
  if (o.pass) {
    o.detail = "round-trip " + std::to_string(round_trips) + "/" + std::to_string(kCookieCases) + ", diff " +
               std::to_string(diffs) + "/" + std::to_string(kCookieCases) + ", fuzz " +
               std::to_string(kFuzzInputs) + " inputs 0 crashes";
  }
  return o;
}

// Learns the value scheme from four logins by two accounts, forges a fresh
// value an hour later and replays it from the attacker's environment.
bool forge_trial(const std::string& id, FlawKind kind, int trial) {
  LiveTarget live(matrix_config(id), testing::fixed_start() + std::chrono::hours(24 * trial));
  RiskProbe probe(live.target(), live.clock);
  std::vector<TrustCookieSet> sets;
  std::vector<Timestamp> when;
  for (const auto& who : {victim(), victim(), attacker(), attacker()}) {
    SessionEnv v = probe.make_env(EnvRole::kVictim);
    when.push_back(live.clock->now_seconds());
    sets.push_back(probe.isolate_trust_cookies(who, v, probe.make_env(EnvRole::kAttacker)));
    live.clock->advance(seconds(97 + trial));
  }
  auto analysis = analyze_value_scheme(sets, when);
  for (const auto& f : analysis.flaws) {
    if (f.kind != kind) continue;
    live.clock->advance(std::chrono::hours(1));
    auto rec = forge_cookie_value(f, sets[0].records[0], live.clock->now());
    TrustCookieSet forged;
    forged.keys.insert(rec.key());
    forged.records.push_back(rec);
    return probe.verify_bypass(victim(), forged, probe.make_env(EnvRole::kAttacker));
  }
  return false;
}

// On Random128 nothing is learnable: no flaw, forging refuses, and a
// guessed value of the same shape does not open the account.
bool random_resists(int trial) {
  LiveTarget live(matrix_config("co-rand-sh"), testing::fixed_start() + std::chrono::hours(24 * trial));
  RiskProbe probe(live.target(), live.clock);
  std::vector<TrustCookieSet> sets;
  std::vector<Timestamp> when;
  for (const auto& who : {victim(), victim(), attacker(), attacker()}) {
    SessionEnv v = probe.make_env(EnvRole::kVictim);
    when.push_back(live.clock->now_seconds());
    sets.push_back(probe.isolate_trust_cookies(who, v, probe.make_env(EnvRole::kAttacker)));
    live.clock->advance(seconds(97));
  }
  if (!analyze_value_scheme(sets, when).flaws.empty()) return false;
  DesignFlaw guess{FlawKind::kPredictableTimestamp, "", sets[0].records[0].key(), std::nullopt, std::nullopt};
  try {
    forge_cookie_value(guess, sets[0].records[0], live.clock->now());
    return false;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kUnforgeable) return false;
  }
  auto rec = sets[0].records[0];
  rec.value = random_hex(rec.value.size() / 2);
  TrustCookieSet forged;
  forged.keys.insert(rec.key());
  forged.records.push_back(rec);
  return !probe.verify_bypass(victim(), forged, probe.make_env(EnvRole::kAttacker));
}

Outcome end_to_end_a4() {
  Outcome o;
  struct Case {
    const char* id;
    FlawKind kind;
  };
  const Case cases[] = {{"co-ts-sec", FlawKind::kPredictableTimestamp},
                        {"co-ts-ms", FlawKind::kPredictableTimestamp},
                        {"co-global", FlawKind::kCrossAccountReuse},
                        {"co-fixed", FlawKind::kFixedValue}};
  int ok = 0, total = 0;
  for (const auto& c : cases) {
    for (int t = 0; t < kA4Trials; ++t, ++total) {
      bool good = false;
      try {
        good = forge_trial(c.id, c.kind, t);
      } catch (const Error& e) {
        o.check(false, std::string(c.id) + ": " + e.what());
      }
      ok += good;
      if (!good) o.check(false, std::string(c.id) + " trial " + std::to_string(t));
    }
  }
  for (int t = 0; t < kA4Trials; ++t, ++total) {
    bool good = false;
    try {
      good = random_resists(t);
    } catch (const Error& e) {
      o.check(false, std::string("co-rand-sh: ") + e.what());
    }
    ok += good;
    if (!good) o.check(false, "co-rand-sh trial " + std::to_string(t));
  }
  if (o.pass) o.detail = std::to_string(ok) + "/" + std::to_string(total) + " trials (4 forgeable variants, Random128 unforgeable)";
  return o;
}

Outcome spider() {
  Outcome o;
  auto corpus = load_corpus(fixture("spider/docs.jsonl"));
  auto domains = load_domain_list(fixture("spider/domains.txt"));
  auto labels = oracle::load_json_file(fixture("spider/labels.json"));
  std::set<std::string> positive;
  for (const auto& d : labels.at("positive")) positive.insert(d.get<std::string>());
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& v : run_spider(domains, corpus)) {
    bool truth = positive.count(v.domain) > 0;
    tp += v.supports2fa && truth;
    fp += v.supports2fa && !truth;
    fn += !v.supports2fa && truth;
  }
  double precision = tp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  double recall = tp ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  o.check(precision == 1.0, "precision " + std::to_string(precision));
  o.check(recall == 1.0, "recall " + std::to_string(recall));
  std::set<std::string> prev;
  bool monotone = true;
  for (double t = 0.0; t <= 20.0; t += 0.25) {
    ScoringConfig c;
    c.threshold = t;
    std::set<std::string> pos;
    for (const auto& v : run_spider(domains, corpus, c)) {
      if (v.supports2fa) pos.insert(v.domain);
    }
    if (t > 0.0) monotone &= std::includes(prev.begin(), prev.end(), pos.begin(), pos.end());
    prev = std::move(pos);
  }
  o.check(monotone, "threshold monotonicity");
  if (o.pass) {
    o.detail = "precision 1.0, recall 1.0 (" + std::to_string(tp) + " positives), monotone over 81 thresholds";
  }
  return o;
}

}  // namespace
}  // namespace se2fa

int main() {
  using namespace se2fa;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"variant-matrix recovery", matrix_recovery},
      {"table reproduction", table_reproduction},
      {"aggregates", aggregates},
      {"minimization oracle", minimization},
      {"totp", totp},
      {"cookie layer", cookie_layer},
      {"end-to-end A4", end_to_end_a4},
      {"spider", spider},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed ? 1 : 0;
}
