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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tailnoise/noise.h"

namespace tailnoise {

inline constexpr std::string_view kNoiseCsvHeader = "start_ns,duration_ns,source,kind";

std::string EncodeNoiseLog(const std::vector<NoiseEvent>& events);

// Parses noise CSV into events sorted by start. Throws ParseError naming
// the line for malformed rows and ValidationError for durations <= 0.
std::vector<NoiseEvent> ParseNoiseLog(std::string_view text);

// Anchor that maps HotSpot log timestamps onto a run's time base.
struct LogOrigin {
  enum class Clock : uint8_t {
    // Use the wall-clock decoration ([2021-07-01T10:00:00.123+0200]);
    // origin_ns is the run origin in ns since the Unix epoch.
    kWallClock,
    // Use the uptime decoration ([12.345s], [12345ms] or [12345678ns]);
    // origin_ns is the JVM uptime at the run origin.
    kUptime,
  };

  Clock clock = Clock::kWallClock;
  int64_t origin_ns = 0;
};

// "uptime:<duration>" selects the uptime clock. Anything else is a
// wall-clock anchor: integer ns since the epoch or an ISO-8601 timestamp
// ("2021-07-01T10:00:00.123+0200", "...Z"). Throws ParseError.
LogOrigin ParseLogOrigin(std::string_view text);

// ISO-8601 timestamp with optional fraction and offset to ns since the
// epoch. Throws ParseError.
int64_t ParseIsoTimestamp(std::string_view text);

struct SafepointParseResult {
  std::vector<NoiseEvent> events;
  // Lines that did not match the safepoint record grammar.
  std::size_t skipped_lines = 0;
};

// Extracts one event per `Safepoint "<name>", ...` record of a HotSpot
// unified log (-Xlog:safepoint). Duration is "Reaching safepoint" plus
// "At safepoint"; a "Cleanup" field between them is accepted and ignored.
// HotSpot writes the record when the safepoint ends, so the event starts
// at the line timestamp minus the duration, re-based to `origin`.
// Throws ParseError if the input has text but no record parses.
SafepointParseResult ParseHotspotSafepointLog(std::string_view text, const LogOrigin& origin);

}  // namespace tailnoise
