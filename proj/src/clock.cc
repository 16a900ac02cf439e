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

#include "se2fa/clock.h"

namespace se2fa {

TimePoint SystemClock::now() const {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(
      std::chrono::system_clock::now());
}

ManualClock::ManualClock(TimePoint start)
    : millis_(start.time_since_epoch().count()) {}

TimePoint ManualClock::now() const {
  return TimePoint(std::chrono::milliseconds(millis_.load()));
}

void ManualClock::set(TimePoint t) { millis_.store(t.time_since_epoch().count()); }

void ManualClock::advance(std::chrono::milliseconds d) { millis_.fetch_add(d.count()); }

std::shared_ptr<Clock> system_clock() {
  static auto clock = std::make_shared<SystemClock>();
  return clock;
}

}  // namespace se2fa
