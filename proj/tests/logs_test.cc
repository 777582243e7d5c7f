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

#include <gtest/gtest.h>

#include <sstream>

#include "tailnoise/errors.h"
#include "tailnoise/file_util.h"
#include "tailnoise/logs.h"

namespace tailnoise {
namespace {

std::string Fixture(const char* name) { return ReadFile(std::string(TAILNOISE_FIXTURE_DIR) + "/" + name); }

std::size_t CountQuotedSafepointLines(const std::string& text) {
  std::istringstream in(text);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += line.find("Safepoint \"") != std::string::npos;
  return n;
}

TEST(NoiseLogTest, RoundTripWithQuoting) {
  std::vector<NoiseEvent> ev = {
      {10, 5, NoiseEvent::Source::kInjected, "periodic"},
      {20, 7, NoiseEvent::Source::kJvmLog, "G1 Evacuation, \"young\""},
  };
  const std::string csv = EncodeNoiseLog(ev);
  EXPECT_EQ(csv.substr(0, kNoiseCsvHeader.size()), kNoiseCsvHeader);
  EXPECT_EQ(ParseNoiseLog(csv), ev);
}

TEST(NoiseLogTest, SortsAndValidates) {
  const std::string h = std::string(kNoiseCsvHeader) + "\n";
  const auto ev = ParseNoiseLog(h + "50,1,injected,b\n10,1,jvm_log,a\n");
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_EQ(ev[0].kind, "a");
  EXPECT_EQ(ev[0].source, NoiseEvent::Source::kJvmLog);
  EXPECT_THROW(ParseNoiseLog(h + "10,0,injected,a\n"), ValidationError);
  try {
    ParseNoiseLog(h + "10,1,injected,a\nx,1,injected,a\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(ParseNoiseLog("start,duration\n"), ParseError);
  EXPECT_THROW(ParseNoiseLog(h + "1,2,elsewhere,a\n"), ParseError);
}

TEST(IsoTimestampTest, ParsesOffsetsAndFractions) {
  EXPECT_EQ(ParseIsoTimestamp("1970-01-01T00:00:00.000+0000"), 0);
  EXPECT_EQ(ParseIsoTimestamp("1970-01-01T00:00:01.5Z"), 1'500'000'000);
  EXPECT_EQ(ParseIsoTimestamp("1970-01-01T02:00:00.000+0200"), 0);
  EXPECT_EQ(ParseIsoTimestamp("2021-07-01T10:00:00.123+02:00"),
            ParseIsoTimestamp("2021-07-01T08:00:00.123+0000"));
  EXPECT_EQ(ParseIsoTimestamp("2000-03-01T00:00:00Z") - ParseIsoTimestamp("2000-02-28T00:00:00Z"),
            2 * 86'400'000'000'000);
  EXPECT_THROW(ParseIsoTimestamp("2021-13-01T00:00:00Z"), ParseError);
  EXPECT_THROW(ParseIsoTimestamp("yesterday"), ParseError);
}

TEST(LogOriginTest, Forms) {
  const LogOrigin up = ParseLogOrigin("uptime:1.5s");
  EXPECT_EQ(up.clock, LogOrigin::Clock::kUptime);
  EXPECT_EQ(up.origin_ns, 1'500'000'000);
  const LogOrigin ns = ParseLogOrigin("1700000000000000000");
  EXPECT_EQ(ns.clock, LogOrigin::Clock::kWallClock);
  EXPECT_EQ(ns.origin_ns, 1'700'000'000'000'000'000);
  EXPECT_EQ(ParseLogOrigin("1970-01-01T00:00:02Z").origin_ns, 2'000'000'000);
}

TEST(SafepointLogTest, SyntheticRecordSumsReachAndAt) {
  const std::string line =
      "[2026-01-01T00:00:01.000+0000][1.000s] Safepoint \"Cleanup\", Time since last: 1000 ns, "
      "Reaching safepoint: 123 ns, Cleanup: 77 ns, At safepoint: 456 ns, Total: 656 ns\n";
  LogOrigin origin{LogOrigin::Clock::kWallClock, ParseIsoTimestamp("2026-01-01T00:00:00Z")};
  const auto r = ParseHotspotSafepointLog(line, origin);
  ASSERT_EQ(r.events.size(), 1u);
  EXPECT_EQ(r.events[0].duration_ns, 579);
  EXPECT_EQ(r.events[0].kind, "Cleanup");
  EXPECT_EQ(r.events[0].source, NoiseEvent::Source::kJvmLog);
  // Logged at the end of the pause.
  EXPECT_EQ(r.events[0].start_ns, 1'000'000'000 - 579);

  const auto u = ParseHotspotSafepointLog(line, ParseLogOrigin("uptime:0.25s"));
  EXPECT_EQ(u.events[0].start_ns, 750'000'000 - 579);
}

TEST(SafepointLogTest, UptimeUnitsAndDefaultDecorations) {
  const std::string text =
      "[0.500s][info][safepoint] Safepoint \"A\", Time since last: 1 ns, Reaching safepoint: 10 ns, "
      "Cleanup: 1 ns, At safepoint: 20 ns, Total: 31 ns\n"
      "[700ms][info][safepoint] Safepoint \"B\", Time since last: 1 ns, Reaching safepoint: 1 ns, "
      "Cleanup: 1 ns, At safepoint: 1 ns, Total: 3 ns\n"
      "[0.9s][900000123ns] Safepoint \"C\", Time since last: 1 ns, Reaching safepoint: 0 ns, "
      "Cleanup: 0 ns, At safepoint: 3 ns, Total: 3 ns\n"
      "[1.0s][info][gc] GC(3) Pause Young (Normal) 20M->5M(256M) 3.1ms\n";
  const auto r = ParseHotspotSafepointLog(text, ParseLogOrigin("uptime:0s"));
  ASSERT_EQ(r.events.size(), 3u);
  EXPECT_EQ(r.skipped_lines, 1u);
  EXPECT_EQ(r.events[0].start_ns, 500'000'000 - 30);
  EXPECT_EQ(r.events[1].start_ns, 700'000'000 - 2);
  EXPECT_EQ(r.events[2].start_ns, 900'000'123 - 3);
}

TEST(SafepointLogTest, MissingDecorationIsAnError) {
  const std::string text =
      "[0.500s] Safepoint \"A\", Time since last: 1 ns, Reaching safepoint: 10 ns, Cleanup: 1 ns, "
      "At safepoint: 20 ns, Total: 31 ns\n";
  EXPECT_THROW(ParseHotspotSafepointLog(text, ParseLogOrigin("0")), ParseError);
  EXPECT_TRUE(ParseHotspotSafepointLog("", ParseLogOrigin("0")).events.empty());
}

TEST(SafepointLogTest, BundledFixture) {
  const std::string text = Fixture("hotspot_safepoint.log");
  const auto wall = ParseHotspotSafepointLog(text, ParseLogOrigin("2026-10-12T14:03:11.464Z"));
  const auto up = ParseHotspotSafepointLog(text, ParseLogOrigin("uptime:0s"));
  const std::size_t quoted = CountQuotedSafepointLines(text);
  ASSERT_GT(quoted, 0u);
  EXPECT_EQ(wall.events.size(), quoted);
  EXPECT_EQ(up.events.size(), quoted);
  for (std::size_t i = 0; i < quoted; ++i) {
    EXPECT_GT(wall.events[i].duration_ns, 0);
    if (i > 0) {
      EXPECT_GE(wall.events[i].start_ns, wall.events[i - 1].start_ns);
    }
    // Both clocks place the event within a millisecond of each other.
    EXPECT_NEAR(static_cast<double>(wall.events[i].start_ns), static_cast<double>(up.events[i].start_ns),
                1e6);
  }
}

}  // namespace
}  // namespace tailnoise
