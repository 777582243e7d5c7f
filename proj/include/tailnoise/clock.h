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

#pragma once

#include <cstdint>

namespace tailnoise {

// CLOCK_MONOTONIC in nanoseconds. All trace timestamps derive from this.
int64_t MonotonicNanos();

// CLOCK_REALTIME in nanoseconds since the Unix epoch.
int64_t WallClockNanos();

// Spin window used by WaitUntil when none is given.
constexpr int64_t kDefaultSpinWindowNanos = 200'000;

// Blocks until MonotonicNanos() >= deadline_ns. Sleeps until the deadline is
// within spin_window_ns, then spins. The spin loop yields the CPU on each
// iteration so that oversubscribed workers still make progress.
void WaitUntil(int64_t deadline_ns, int64_t spin_window_ns = kDefaultSpinWindowNanos);

// Lowers the calling thread's timer slack to 1ns (Linux only; no-op
// elsewhere). Without this, sleeps overshoot by the default 50us slack.
void TightenTimerSlack();

}  // namespace tailnoise
