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

#ifndef SE2FA_REPORT_H_
#define SE2FA_REPORT_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "se2fa/evaluator.h"

namespace se2fa {

enum class SiteGroup { kG1, kG2CookieOnly, kG2Other, kG3, kG4, kG5 };

std::string_view group_name(SiteGroup g);

// Known verification methods, in report order.
const std::vector<std::string>& known_methods();

struct SiteRecord {
  std::string domain;
  std::optional<int> rank;
  bool registrable = true;
  bool requires_third_party = false;
  bool supports2fa = true;
  bool can_enable2fa = true;
  bool has_remember_device = false;
  std::optional<bool> cookie_only;
  std::vector<std::string> methods;
  std::optional<EvaluationVerdict> verdict;
};

SiteRecord site_from_json(const Json& j, std::size_t index = 0);
Json site_to_json(const SiteRecord& s);
std::vector<SiteRecord> load_sites(const std::string& path);

// Throws Error(kUnclassifiable) when the site has no 2FA.
SiteGroup classify_group(const SiteRecord& r);

struct AggregateStats {
  std::map<SiteGroup, std::size_t> groups;
  std::size_t cookie_only = 0;
  std::size_t with_remember = 0;
  double cookie_only_fraction() const {
    return with_remember ? static_cast<double>(cookie_only) / with_remember : 0.0;
  }

  // Over cookie-based audited sites, by the longest-lived trust cookie.
  std::map<ExpiryBucket, std::size_t> expiry_buckets;
  std::map<int, std::size_t> expiry_days;
  std::size_t expiry_up_to_7 = 0;
  std::size_t expiry_30 = 0;
  std::size_t expiry_400 = 0;
  std::optional<int> modal_expiry_days;
  std::size_t missing_http_only = 0;
  std::size_t missing_secure = 0;
  std::map<FlawKind, std::size_t> flaws;

  // Sites with 2FA per 1,000-rank bucket (index 0 covers ranks 1..1000).
  std::map<int, std::size_t> rank_buckets;
  std::map<std::string, std::size_t> method_totals;
  std::map<std::size_t, std::size_t> methods_per_site;
  std::map<std::string, std::map<std::size_t, std::size_t>> method_by_count;
  std::map<NotificationType, std::size_t> notifications;
};

AggregateStats aggregate_stats(const std::vector<SiteRecord>& records);
Json stats_to_json(const AggregateStats& s);

// One table row per verdict. `website` and `rank` come from the site
// record when there is one.
struct ReportEntry {
  std::string website;
  std::optional<int> rank;
  EvaluationVerdict verdict;
};

enum class ReportFormat { kJson, kCsv, kMd };

// Throws Error(kUnsupportedFormat).
ReportFormat report_format_from_name(std::string_view name);

std::vector<std::string> report_columns();
std::vector<std::vector<std::string>> report_cells(std::vector<ReportEntry> entries);
std::string render_report(std::vector<ReportEntry> entries, ReportFormat format);

struct Recommendation {
  std::string kind;  // SetSecure, SetHttpOnly, ShortenExpiry, AddRiskFactors, ...
  std::string detail;
  friend bool operator==(const Recommendation&, const Recommendation&) = default;
};

std::vector<Recommendation> recommend_mitigations(const EvaluationVerdict& v);
Json recommendations_to_json(const std::vector<Recommendation>& r);

}  // namespace se2fa

#endif  // SE2FA_REPORT_H_
