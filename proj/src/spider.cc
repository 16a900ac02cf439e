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

#include "se2fa/spider.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <httplib.h>

#include "se2fa/error.h"

namespace se2fa {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool host_char(unsigned char c) { return std::isalnum(c) || c == '-' || c >= 0x80; }

// Host of an absolute URL, or the string itself.
std::string url_host(std::string_view url) {
  auto sep = url.find("://");
  if (sep != std::string_view::npos) url.remove_prefix(sep + 3);
  auto end = url.find_first_of("/:?#");
  return std::string(url.substr(0, end));
}

}  // namespace

Json doc_to_json(const SpiderDoc& d) {
  return Json{{"domain", d.domain}, {"sourceEngine", d.source_engine}, {"title", d.title},
              {"snippet", d.snippet}, {"url", d.url}};
}

SpiderDoc doc_from_json(const Json& j) {
  SpiderDoc d;
  try {
    d.domain = j.at("domain").get<std::string>();
    d.source_engine = j.value("sourceEngine", "");
    d.title = j.value("title", "");
    d.snippet = j.value("snippet", "");
    d.url = j.value("url", "");
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("spider doc: ") + e.what());
  }
  if (d.domain.empty()) throw Error(ErrorCode::kFormatError, "spider doc has an empty domain");
  return d;
}

std::vector<SpiderDoc> parse_corpus(std::string_view jsonl) {
  std::vector<SpiderDoc> out;
  std::size_t line_no = 0;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = Json::parse(line, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::kFormatError, "corpus line is not JSON", line_no);
    out.push_back(doc_from_json(j));
  }
  return out;
}

std::vector<SpiderDoc> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFormatError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_corpus(ss.str());
}

ScoringConfig scoring_config_from_json(const Json& j) {
  ScoringConfig c;
  try {
    if (j.contains("terms")) c.terms = j["terms"].get<std::vector<std::string>>();
    c.term_weight = j.value("termWeight", c.term_weight);
    c.domain_weight = j.value("domainWeight", c.domain_weight);
    c.threshold = j.value("threshold", c.threshold);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("scoring config: ") + e.what());
  }
  return c;
}

Json spider_verdict_to_json(const SpiderVerdict& v) {
  return Json{{"domain", v.domain}, {"score", v.score}, {"supports2fa", v.supports2fa},
              {"matchedTerms", v.matched_terms}};
}

SpiderVerdict spider_verdict_from_json(const Json& j) {
  SpiderVerdict v;
  v.domain = j.at("domain").get<std::string>();
  v.score = j.at("score").get<double>();
  v.supports2fa = j.at("supports2fa").get<bool>();
  v.matched_terms = j.value("matchedTerms", std::vector<std::string>{});
  return v;
}

Json comparison_to_json(const SetComparison& c) {
  return Json{{"onlyBaseline", c.only_baseline}, {"onlySpider", c.only_spider},
              {"intersection", c.intersection}, {"accuracy", c.accuracy}};
}

std::string build_query(std::string_view domain) {
  if (domain.empty()) throw Error(ErrorCode::kInvalidArgument, "empty domain");
  return "2FA OR MFA website " + std::string(domain);
}

bool references_domain(std::string_view text, std::string_view domain) {
  if (domain.empty()) return false;
  std::string t = lower(text), d = lower(domain);
  for (auto pos = t.find(d); pos != std::string::npos; pos = t.find(d, pos + 1)) {
    bool left_ok = pos == 0 || (!host_char(t[pos - 1]) && t[pos - 1] != '.');
    auto end = pos + d.size();
    bool right_ok = end == t.size() || !host_char(t[end]);
    // "example.com.evil.net" is a different host.
    if (right_ok && end + 1 < t.size() && t[end] == '.' && host_char(t[end + 1])) right_ok = false;
    if (left_ok && right_ok) return true;
  }
  return false;
}

double score_document(const SpiderDoc& doc, std::string_view domain, const ScoringConfig& config,
                      std::vector<std::string>* matched) {
  std::string text = doc.title + "\n" + doc.snippet;
  std::string host = lower(url_host(doc.url));
  std::string d = lower(domain);
  bool url_refs = !d.empty() && (host == d || (host.size() > d.size() &&
                                               host.compare(host.size() - d.size(), d.size(), d) == 0 &&
                                               host[host.size() - d.size() - 1] == '.'));
  if (!url_refs && !references_domain(text, domain)) return 0.0;

  std::string lt = lower(text);
  double score = config.domain_weight;
  for (const auto& term : config.terms) {
    if (lt.find(lower(term)) != std::string::npos) {
      score += config.term_weight;
      if (matched) matched->push_back(term);
    }
  }
  return score;
}

SpiderVerdict verdict_for_domain(std::string_view domain, const std::vector<SpiderDoc>& docs,
                                 const ScoringConfig& config) {
  SpiderVerdict v;
  v.domain = std::string(domain);
  for (const auto& doc : docs) {
    std::vector<std::string> terms;
    double s = score_document(doc, domain, config, &terms);
    if (s > v.score) {
      v.score = s;
      v.matched_terms = std::move(terms);
    }
  }
  v.supports2fa = v.score >= config.threshold;
  return v;
}

std::vector<SpiderVerdict> run_spider(const std::vector<std::string>& domains,
                                      const std::vector<SpiderDoc>& corpus,
                                      const ScoringConfig& config) {
  std::map<std::string, std::vector<SpiderDoc>> by_domain;
  for (const auto& d : corpus) by_domain[lower(d.domain)].push_back(d);
  std::vector<SpiderVerdict> out;
  for (const auto& dom : domains) {
    auto it = by_domain.find(lower(dom));
    out.push_back(verdict_for_domain(dom, it == by_domain.end() ? std::vector<SpiderDoc>{} : it->second,
                                     config));
  }
  return out;
}

SetComparison compare_with_baseline(const std::vector<SpiderVerdict>& verdicts,
                                    const std::vector<std::string>& baseline) {
  std::set<std::string> spider, base;
  for (const auto& v : verdicts) {
    if (v.supports2fa) spider.insert(lower(v.domain));
  }
  for (const auto& b : baseline) base.insert(lower(b));
  SetComparison c;
  for (const auto& d : base) {
    if (spider.count(d)) ++c.intersection;
    else ++c.only_baseline;
  }
  c.only_spider = spider.size() - c.intersection;
  c.accuracy = base.empty() ? 0.0 : static_cast<double>(c.intersection) / base.size();
  return c;
}

std::vector<std::string> load_domain_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFormatError, "cannot open " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    out.push_back(line);
  }
  return out;
}

SearxEngine::SearxEngine(std::string base_url, std::string engines)
    : base_url_(std::move(base_url)), engines_(std::move(engines)) {}

std::vector<SpiderDoc> SearxEngine::search(std::string_view domain) {
  httplib::Client cli(base_url_);
  cli.set_connection_timeout(10);
  cli.set_read_timeout(30);
  httplib::Params params{{"q", build_query(domain)}, {"format", "json"}, {"engines", engines_}};
  auto res = cli.Get("/search", params, httplib::Headers{});
  if (!res) throw Error(ErrorCode::kTargetUnreachable, base_url_ + ": " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw Error(ErrorCode::kTargetUnreachable, base_url_ + " returned HTTP " + std::to_string(res->status));
  }
  auto j = Json::parse(res->body, nullptr, false);
  if (j.is_discarded() || !j.contains("results")) {
    throw Error(ErrorCode::kFormatError, "search response has no results array");
  }
  std::vector<SpiderDoc> out;
  for (const auto& r : j["results"]) {
    SpiderDoc d;
    d.domain = std::string(domain);
    d.title = r.value("title", "");
    d.snippet = r.value("content", "");
    d.url = r.value("url", "");
    if (r.contains("engine") && r["engine"].is_string()) d.source_engine = r["engine"];
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace se2fa
