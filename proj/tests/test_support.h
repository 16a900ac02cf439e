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

#ifndef SE2FA_TESTS_TEST_SUPPORT_H_
#define SE2FA_TESTS_TEST_SUPPORT_H_

#include <memory>
#include <string>

#include "se2fa/clock.h"
#include "se2fa/flow.h"
#include "se2fa/testbed.h"

namespace se2fa::testing {

inline std::string fixture(const std::string& rel) {
  return std::string(SE2FA_FIXTURES_DIR) + "/" + rel;
}

// 2024-06-10T06:13:20Z
inline TimePoint fixed_start() { return TimePoint(std::chrono::seconds(1718000000)); }

inline Credentials victim() { return load_credentials(fixture("testbed/victim.json")); }
inline Credentials attacker() { return load_credentials(fixture("testbed/attacker.json")); }

inline const std::vector<TargetConfig>& matrix() {
  static const auto m = load_matrix(fixture("testbed/matrix.json"));
  return m;
}

inline TargetConfig matrix_config(const std::string& id) {
  for (const auto& c : matrix()) {
    if (c.id == id) return c;
  }
  throw std::runtime_error("no matrix target " + id);
}

// A config with the fixture accounts and nothing else.
inline TargetConfig bare_config(const std::string& id) {
  TargetConfig c;
  c.id = id;
  c.accounts = matrix().front().accounts;
  return c;
}

inline TrustCookieSpec spec(std::string name, ValueScheme scheme = ValueScheme::kRandom128,
                            bool secure = true, bool http_only = true,
                            std::optional<std::int64_t> max_age = 30 * 86400) {
  return {std::move(name), scheme, secure, http_only, max_age};
}

// A testbed service on a free port with a manual clock.
struct LiveTarget {
  std::shared_ptr<ManualClock> clock;
  std::unique_ptr<TestbedService> service;

  explicit LiveTarget(const TargetConfig& config, TimePoint start = fixed_start())
      : clock(std::make_shared<ManualClock>(start)),
        service(std::make_unique<TestbedService>(config, clock, ServiceOptions{true, {}, {}})) {
    service->start("127.0.0.1", 0);
  }

  Target target() const { return Target(service->base_url()); }
  FlowDriver driver() const { return FlowDriver(target(), clock); }
};

}  // namespace se2fa::testing

#endif  // SE2FA_TESTS_TEST_SUPPORT_H_
