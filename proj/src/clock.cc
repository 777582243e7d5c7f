// Copyright 2026 The tailnoise Authors
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

#include "tailnoise/clock.h"

#include <sched.h>
#include <time.h>

#include <cerrno>

#ifdef __linux__
#include <sys/prctl.h>
#endif

#include "tailnoise/duration.h"

namespace tailnoise {

namespace {

int64_t ReadClock(clockid_t id) {
  timespec ts;
  clock_gettime(id, &ts);
  return static_cast<int64_t>(ts.tv_sec) * kNanosPerSecond + ts.tv_nsec;
}

}  // namespace

int64_t MonotonicNanos() { return ReadClock(CLOCK_MONOTONIC); }

int64_t WallClockNanos() { return ReadClock(CLOCK_REALTIME); }

void WaitUntil(int64_t deadline_ns, int64_t spin_window_ns) {
  const int64_t sleep_until = deadline_ns - spin_window_ns;
  if (MonotonicNanos() < sleep_until) {
    timespec ts{static_cast<time_t>(sleep_until / kNanosPerSecond),
                static_cast<long>(sleep_until % kNanosPerSecond)};
    while (clock_nanosleep(CLOCK_MONOTONIC, TIMER_ABSTIME, &ts, nullptr) == EINTR) {
    }
  }
  while (MonotonicNanos() < deadline_ns) {
    sched_yield();
  }
}

void TightenTimerSlack() {
#ifdef __linux__
  prctl(PR_SET_TIMERSLACK, 1UL, 0UL, 0UL, 0UL);
#endif
}

}  // namespace tailnoise
