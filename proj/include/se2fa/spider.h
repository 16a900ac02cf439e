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

#ifndef SE2FA_SPIDER_H_
#define SE2FA_SPIDER_H_

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "se2fa/cookie.h"

namespace se2fa {

struct SpiderDoc {
  std::string domain;
  std::string source_engine;
  std::string title;
  std::string snippet;
  std::string url;
};

Json doc_to_json(const SpiderDoc& d);
SpiderDoc doc_from_json(const Json& j);

// JSON Lines, one document per line; blank lines are skipped.
std::vector<SpiderDoc> load_corpus(const std::string& path);
std::vector<SpiderDoc> parse_corpus(std::string_view jsonl);

struct ScoringConfig {
  std::vector<std::string> terms = {"2fa", "mfa", "two-factor", "two factor", "multi-factor",
                                    "two-step"};
  double term_weight = 2.0;
  double domain_weight = 1.0;
  double threshold = 3.0;
};

ScoringConfig scoring_config_from_json(const Json& j);

struct SpiderVerdict {
  std::string domain;
  double score = 0.0;
  bool supports2fa = false;
  std::vector<std::string> matched_terms;
};

Json spider_verdict_to_json(const SpiderVerdict& v);
SpiderVerdict spider_verdict_from_json(const Json& j);

struct SetComparison {
  std::size_t only_baseline = 0;
  std::size_t only_spider = 0;
  std::size_t intersection = 0;
  double accuracy = 0.0;  // intersection / |baseline|
};

Json comparison_to_json(const SetComparison& c);

// Throws Error(kInvalidArgument) for an empty domain.
std::string build_query(std::string_view domain);

// Whether `text` mentions `domain` as a whole host name (not as part of a
// longer label such as "notexample.com").
bool references_domain(std::string_view text, std::string_view domain);

double score_document(const SpiderDoc& doc, std::string_view domain,
                      const ScoringConfig& config = {},
                      std::vector<std::string>* matched = nullptr);

SpiderVerdict verdict_for_domain(std::string_view domain, const std::vector<SpiderDoc>& docs,
                                 const ScoringConfig& config = {});

// Scores every domain in `domains`, using the corpus documents for it.
std::vector<SpiderVerdict> run_spider(const std::vector<std::string>& domains,
                                      const std::vector<SpiderDoc>& corpus,
                                      const ScoringConfig& config = {});

SetComparison compare_with_baseline(const std::vector<SpiderVerdict>& verdicts,
                                    const std::vector<std::string>& baseline);

std::vector<std::string> load_domain_list(const std::string& path);

// Live search seam.
class SearchEngine {
 public:
  virtual ~SearchEngine() = default;
  virtual std::vector<SpiderDoc> search(std::string_view domain) = 0;
};

// Self-hosted SearXNG instance (JSON API).
class SearxEngine : public SearchEngine {
 public:
  explicit SearxEngine(std::string base_url,
                       std::string engines = "google,bing,yandex,yahoo");
  std::vector<SpiderDoc> search(std::string_view domain) override;

 private:
  std::string base_url_;
  std::string engines_;
};

}  // namespace se2fa

#endif  // SE2FA_SPIDER_H_
