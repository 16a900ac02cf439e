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

#ifndef SE2FA_CLOCK_H_
#define SE2FA_CLOCK_H_

#include <atomic>
#include <chrono>
#include <memory>

namespace se2fa {

// Cookie timestamps have one-second resolution (RFC 3339 on the wire).
using Timestamp = std::chrono::sys_seconds;
// Clock readings keep milliseconds for millisecond-epoch cookie values.
using TimePoint = std::chrono::sys_time<std::chrono::milliseconds>;

inline Timestamp to_timestamp(TimePoint t) {
  return std::chrono::floor<std::chrono::seconds>(t);
}

class Clock {
 public:
  virtual ~Clock() = default;
  virtual TimePoint now() const = 0;
  Timestamp now_seconds() const { return to_timestamp(now()); }
};

class SystemClock final : public Clock {
 public:
  TimePoint now() const override;
};

// Deterministic clock for tests. Thread-safe: the testbed and the driver
// read it from different threads.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(TimePoint start);
  TimePoint now() const override;
  void set(TimePoint t);
  void advance(std::chrono::milliseconds d);

 private:
  std::atomic<std::int64_t> millis_;
};

std::shared_ptr<Clock> system_clock();

}  // namespace se2fa

#endif  // SE2FA_CLOCK_H_
