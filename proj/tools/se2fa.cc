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

// se2fa: command-line front end.

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "se2fa/attack_eval.h"
#include "se2fa/capture.h"
#include "se2fa/cookie.h"
#include "se2fa/error.h"
#include "se2fa/evaluator.h"
#include "se2fa/flow.h"
#include "se2fa/report.h"
#include "se2fa/spider.h"
#include "se2fa/testbed.h"

namespace {

using namespace se2fa;

std::atomic<bool> g_stop{false};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFormatError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormatError, path + ": " + e.what());
  }
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kFormatError, "cannot write " + path);
  out << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// Static analysis of one interchange file: every cookie is treated as a
// trust cookie of a cookie-only target.
Json audit_cookies(const CookieSnapshot& s) {
  TrustCookieSet trust;
  for (const auto& c : s.cookies()) {
    trust.keys.insert(c.key());
    trust.records.push_back(c);
  }
  std::vector<DesignFlaw> flaws;
  std::vector<std::string> warnings;
  for (const auto& c : s.cookies()) {
    if (auto ts = find_timestamp(c.value, c.created_at)) {
      flaws.push_back({FlawKind::kPredictableTimestamp, c.name + " holds an epoch timestamp", c.key(),
                       c.value, ts});
    }
    if (auto p = sensitive_base64_payload(c.value)) {
      flaws.push_back({FlawKind::kSensitiveEncoding, c.name + " decodes to " + *p, c.key(), c.value,
                       std::nullopt});
    }
    if (shannon_entropy(c.value) < 3.0) warnings.push_back("LowEntropy: " + c.name);
  }
  auto audit = build_audit(MeasureSet{.cookie_based = true}, trust, flaws, warnings);
  auto exp = audit_expiry(trust);
  Json out{{"label", s.label()}, {"audit", audit_to_json(audit)}};
  out["expiry"] = {{"maxLifetimeDays",
                    exp.max_lifetime_days ? Json(*exp.max_lifetime_days) : Json(nullptr)},
                   {"bucket", bucket_name(exp.bucket)}};
  Json attacks = Json::array();
  if (!audit.per_cookie.empty()) {
    for (auto a : classify_attack_surface(audit)) attacks.push_back(attack_name(a));
  }
  out["attacks"] = attacks;
  return out;
}

std::vector<EvaluationVerdict> load_verdicts(const std::string& path) {
  Json j = read_json(path);
  const Json* list = &j;
  if (j.is_object() && j.contains("verdicts")) list = &j["verdicts"];
  std::vector<EvaluationVerdict> out;
  if (list->is_array()) {
    for (const auto& v : *list) out.push_back(verdict_from_json(v));
  } else {
    out.push_back(verdict_from_json(*list));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Remember-the-device 2FA evaluation toolkit"};
  app.require_subcommand(1);

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Evaluate one target end to end");
  std::string target_url, creds_path, creds2_path, profile_path, out_path;
  bool insecure_tls = false, no_notifications = false;
  eval->add_option("--target", target_url, "Base URL")->required();
  eval->add_option("--creds", creds_path, "Credentials JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--creds2", creds2_path, "Second account for flaw tests")->check(CLI::ExistingFile);
  eval->add_option("--profile", profile_path, "Target profile JSON")->check(CLI::ExistingFile);
  eval->add_flag("--insecure-tls", insecure_tls, "Skip TLS certificate verification");
  eval->add_flag("--no-notifications", no_notifications, "Skip the notification probe");
  eval->add_option("--out", out_path, "Verdict file (default stdout)");

  // audit
  auto* audit = app.add_subcommand("audit", "Static attribute and value analysis of cookies");
  std::string cookies_path;
  audit->add_option("--cookies", cookies_path, "Interchange JSON")->required()->check(CLI::ExistingFile);
  audit->add_option("--out", out_path, "Output file (default stdout)");

  // testbed
  auto* tb = app.add_subcommand("testbed", "Serve mock 2FA services");
  std::string config_path, host = "127.0.0.1", cert_path, key_path;
  int base_port = 8440;
  bool expose_truth = false, tls = false;
  tb->add_option("--config", config_path, "Matrix JSON")->required()->check(CLI::ExistingFile);
  tb->add_option("--base-port", base_port, "First port (0 = any free port)");
  tb->add_option("--host", host, "Bind address");
  tb->add_flag("--expose-truth", expose_truth, "Enable ground-truth and reset hooks");
  tb->add_flag("--tls", tls, "Serve HTTPS");
  tb->add_option("--cert", cert_path, "TLS certificate (PEM)");
  tb->add_option("--key", key_path, "TLS private key (PEM)");

  // spider
  auto* sp = app.add_subcommand("spider", "Score search results for 2FA support");
  std::string corpus_path, domains_path, baseline_path, searx_url, scoring_path;
  double threshold = 3.0;
  sp->add_option("--corpus", corpus_path, "JSONL corpus")->check(CLI::ExistingFile);
  sp->add_option("--searx", searx_url, "SearXNG base URL");
  sp->add_option("--domains", domains_path, "Domain list")->required()->check(CLI::ExistingFile);
  auto* thr = sp->add_option("--threshold", threshold, "Score threshold");
  sp->add_option("--scoring", scoring_path, "Scoring config JSON")->check(CLI::ExistingFile);
  sp->add_option("--baseline", baseline_path, "Directory domain list")->check(CLI::ExistingFile);
  sp->add_option("--out", out_path, "Verdicts file (default stdout)");

  // report
  auto* rep = app.add_subcommand("report", "Render per-site audit tables and statistics");
  std::string verdicts_path, sites_path, format = "md", stats_path, mitig_path;
  rep->add_option("--verdicts", verdicts_path, "Verdict JSON")->check(CLI::ExistingFile);
  rep->add_option("--sites", sites_path, "Site records JSON")->check(CLI::ExistingFile);
  rep->add_option("--format", format, "json, csv or md");
  rep->add_option("--stats", stats_path, "Also write aggregate statistics here");
  rep->add_option("--mitigations", mitig_path, "Also write recommendations here");
  rep->add_option("--out", out_path, "Report file (default stdout)");

  // flow
  auto* fl = app.add_subcommand("flow", "Run one flow script");
  std::string script_path, env_path;
  fl->add_option("--target", target_url, "Base URL")->required();
  fl->add_option("--creds", creds_path, "Credentials JSON")->required()->check(CLI::ExistingFile);
  fl->add_option("--script", script_path, "Flow script JSON")->required()->check(CLI::ExistingFile);
  fl->add_option("--profile", profile_path, "Target profile JSON")->check(CLI::ExistingFile);
  std::string role = "victim";
  fl->add_option("--env", role, "victim or attacker")->check(CLI::IsMember({"victim", "attacker"}));
  fl->add_flag("--insecure-tls", insecure_tls, "Skip TLS certificate verification");
  fl->add_option("--out", out_path, "Result file (default stdout)");
  std::string capture_path;
  fl->add_option("--capture", capture_path, "Also write the Cookie/Set-Cookie capture log (JSONL)");

  // diff
  auto* df = app.add_subcommand("diff", "Diff two interchange snapshots");
  std::string before_path, after_path;
  df->add_option("--before", before_path)->required()->check(CLI::ExistingFile);
  df->add_option("--after", after_path)->required()->check(CLI::ExistingFile);
  df->add_option("--out", out_path, "Diff file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*eval) {
      Target target(target_url, profile_path.empty() ? TargetProfile{} : load_target_profile(profile_path));
      target.set_verify_tls(!insecure_tls);
      EvaluateOptions opts;
      if (!creds2_path.empty()) opts.second_account = load_credentials(creds2_path);
      opts.probe_notifications = !no_notifications;
      auto v = evaluate_target(target, load_credentials(creds_path), system_clock(), opts);
      write_output(out_path, dump(verdict_to_json(v)));
    } else if (*audit) {
      write_output(out_path, dump(audit_cookies(parse_snapshot(read_file(cookies_path)))));
    } else if (*tb) {
      ServiceOptions opts;
      opts.expose_truth = expose_truth;
      if (tls) {
        if (cert_path.empty() || key_path.empty()) {
          throw Error(ErrorCode::kInvalidConfig, "--tls needs --cert and --key");
        }
        opts.tls_cert = cert_path;
        opts.tls_key = key_path;
      }
      auto configs = load_matrix(config_path);
      TestbedFleet fleet(configs, system_clock(), opts);
      fleet.start(host, base_port);
      for (std::size_t i = 0; i < fleet.size(); ++i) {
        std::cout << configs[i].id << " " << fleet.at(i).base_url() << "\n";
      }
      std::cout << std::flush;
      std::signal(SIGINT, [](int) { g_stop = true; });
      std::signal(SIGTERM, [](int) { g_stop = true; });
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      fleet.stop();
    } else if (*sp) {
      ScoringConfig cfg = scoring_path.empty() ? ScoringConfig{}
                                               : scoring_config_from_json(read_json(scoring_path));
      if (thr->count() > 0) cfg.threshold = threshold;
      auto domains = load_domain_list(domains_path);
      std::vector<SpiderDoc> corpus;
      if (!corpus_path.empty()) {
        corpus = load_corpus(corpus_path);
      } else if (!searx_url.empty()) {
        SearxEngine engine(searx_url);
        for (const auto& d : domains) {
          auto docs = engine.search(d);
          corpus.insert(corpus.end(), docs.begin(), docs.end());
        }
      } else {
        throw Error(ErrorCode::kInvalidArgument, "spider needs --corpus or --searx");
      }
      auto verdicts = run_spider(domains, corpus, cfg);
      Json out{{"threshold", cfg.threshold}, {"verdicts", Json::array()}};
      for (const auto& v : verdicts) out["verdicts"].push_back(spider_verdict_to_json(v));
      if (!baseline_path.empty()) {
        out["comparison"] = comparison_to_json(compare_with_baseline(verdicts, load_domain_list(baseline_path)));
      }
      write_output(out_path, dump(out));
    } else if (*rep) {
      auto fmt = report_format_from_name(format);
      std::vector<SiteRecord> sites;
      if (!sites_path.empty()) sites = load_sites(sites_path);
      std::vector<ReportEntry> entries;
      std::vector<EvaluationVerdict> verdicts;
      if (!verdicts_path.empty()) {
        verdicts = load_verdicts(verdicts_path);
        for (const auto& v : verdicts) {
          ReportEntry e{v.target, std::nullopt, v};
          for (const auto& s : sites) {
            if (s.domain == v.target) {
              e.rank = s.rank;
              break;
            }
          }
          entries.push_back(std::move(e));
        }
      } else {
        for (const auto& s : sites) {
          if (s.verdict) {
            entries.push_back({s.domain, s.rank, *s.verdict});
            verdicts.push_back(*s.verdict);
          }
        }
      }
      write_output(out_path, render_report(entries, fmt));
      if (!stats_path.empty()) write_output(stats_path, dump(stats_to_json(aggregate_stats(sites))));
      if (!mitig_path.empty()) {
        Json m = Json::array();
        for (const auto& v : verdicts) {
          m.push_back({{"target", v.target}, {"recommendations", recommendations_to_json(recommend_mitigations(v))}});
        }
        write_output(mitig_path, dump(m));
      }
    } else if (*fl) {
      Target target(target_url, profile_path.empty() ? TargetProfile{} : load_target_profile(profile_path));
      target.set_verify_tls(!insecure_tls);
      FlowDriver driver(target, system_clock());
      SessionEnv env = default_env_factory()(role == "victim" ? EnvRole::kVictim : EnvRole::kAttacker);
      auto r = driver.execute(load_flow_script(script_path), env, load_credentials(creds_path));
      write_output(out_path, dump(flow_result_to_json(r)));
      if (!capture_path.empty()) write_output(capture_path, serialize_capture_log(capture_from_trace(r.http_trace)));
    } else if (*df) {
      auto d = diff_snapshots(parse_snapshot(read_file(before_path)), parse_snapshot(read_file(after_path)));
      write_output(out_path, dump(diff_to_json(d)));
    }
  } catch (const Error& e) {
    std::cerr << "se2fa: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
