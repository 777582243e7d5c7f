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

#include <filesystem>
#include <sstream>

#include "json.hpp"
#include "tailnoise/cli.h"
#include "tailnoise/file_util.h"
#include "tailnoise/logs.h"
#include "tailnoise/model.h"
#include "tailnoise/report_json.h"

namespace tailnoise {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "tailnoise");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = Dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tailnoise_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(Cli({}).code, kExitUsage);
  EXPECT_EQ(Cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Cli({"gen-noise", "--model", "sometimes", "--horizon", "5s"}).code, kExitUsage);
  EXPECT_EQ(Cli({"gen-noise", "--model", "off"}).code, kExitUsage);
  EXPECT_EQ(Cli({"--help"}).code, kExitOk);
}

TEST_F(CliTest, GenNoisePeriodic) {
  const CliResult r = Cli({"gen-noise", "--model", "periodic:1s:50ms", "--horizon", "5s", "--seed", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto events = ParseNoiseLog(r.out);
  ASSERT_EQ(events.size(), 4u);
  EXPECT_EQ(events[0].start_ns, 1'000'000'000);
  EXPECT_EQ(Cli({"gen-noise", "--model", "generational", "--horizon", "60s", "--out", Path("n.csv")}).code,
            kExitOk);
  EXPECT_TRUE(fs::exists(Path("n.csv")));
}

TEST_F(CliTest, BadConfigExitsOneAndUnreachableBackendExitsTwo) {
  WriteFile(Path("bad.json"), R"({"workers": -1})");
  EXPECT_EQ(Cli({"run", "--config", Path("bad.json"), "--out", Path("o")}).code, kExitUsage);
  WriteFile(Path("garbled.json"), "{");
  EXPECT_EQ(Cli({"run", "--config", Path("garbled.json"), "--out", Path("o")}).code, kExitUsage);
  EXPECT_EQ(Cli({"run", "--config", Path("missing.json"), "--out", Path("o")}).code, kExitUsage);

  // Port 1 on loopback is essentially never listening.
  WriteFile(Path("dead.json"),
            R"({"backend":{"kind":"echo","address":"127.0.0.1:1"},"warmup":"0s","measure":"100ms"})");
  const CliResult r = Cli({"run", "--config", Path("dead.json"), "--out", Path("o")});
  EXPECT_EQ(r.code, kExitRuntime) << r.err;
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, TraceParseFailureExitsTwo) {
  WriteFile(Path("trace.csv"), std::string(kTraceCsvHeader) + "\n0,NoOp,1,oops,ok\n");
  const CliResult r = Cli({"analyze", "--trace", Path("trace.csv"), "--out", Path("a")});
  EXPECT_EQ(r.code, kExitRuntime);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
}

TEST_F(CliTest, BundledConfigEndToEnd) {
  const std::string out = Path("run");
  const CliResult run = Cli({"run", "--config", std::string(TAILNOISE_SOURCE_DIR) + "/configs/noop-echo.json",
                             "--out", out});
  ASSERT_EQ(run.code, kExitOk) << run.err;
  for (const char* f : {"trace.csv", "noise.csv", "meta.json", "summary.json", "throughput.csv"}) {
    EXPECT_TRUE(fs::exists(fs::path(out) / f)) << f;
  }
  const json summary = json::parse(ReadFile(fs::path(out) / "summary.json"));
  std::vector<int64_t> pct;
  for (const char* k : {"min", "p50", "p95", "p99", "p99.9", "p99.975", "max"}) {
    pct.push_back(summary.at(k).get<int64_t>());
  }
  EXPECT_TRUE(std::is_sorted(pct.begin(), pct.end()));
  EXPECT_GT(summary.at("count").get<uint64_t>(), 0u);

  // analyze reproduces the summary from the trace and writes plot data.
  const CliResult an = Cli({"analyze", "--trace", out + "/trace.csv", "--summary", "--plot", "--rate", "0.01",
                            "--out", Path("an")});
  ASSERT_EQ(an.code, kExitOk) << an.err;
  EXPECT_EQ(json::parse(ReadFile(Path("an/summary.json"))), summary);
  EXPECT_TRUE(fs::exists(Path("an/plot_points.csv")));
  EXPECT_TRUE(fs::exists(Path("an/plot_mean.csv")));

  // compare against itself.
  const CliResult cmp = Cli({"compare", "--baseline", out + "/summary.json", "--perturbed",
                             out + "/summary.json", "--out", Path("cmp")});
  ASSERT_EQ(cmp.code, kExitOk) << cmp.err;
  const json d = json::parse(ReadFile(Path("cmp/distortion.json")));
  for (const char* k : {"p50_ratio", "p95_ratio", "p99_ratio", "max_ratio", "throughput_ratio"}) {
    EXPECT_EQ(d.at(k).get<double>(), 1.0) << k;
  }
  EXPECT_FALSE(d.at("tail_only").get<bool>());

  // attribute with the (empty) injected noise log.
  const CliResult at = Cli({"attribute", "--trace", out + "/trace.csv", "--noise", out + "/noise.csv",
                            "--tail-pct", "99.9", "--out", Path("at")});
  ASSERT_EQ(at.code, kExitOk) << at.err;
  const json a = json::parse(ReadFile(Path("at/attribution.json")));
  EXPECT_TRUE(a.at("no_noise").get<bool>());

  // meta.json re-runs as a config.
  const json meta = json::parse(ReadFile(fs::path(out) / "meta.json"));
  EXPECT_EQ(meta.at("config").at("backend").at("kind"), "echo");
  EXPECT_EQ(meta.at("run_meta").at("benchmark"), "noop");
}

TEST_F(CliTest, AttributeWithJvmLog) {
  // A trace whose single long sample spans the fixture's first safepoint.
  const std::string log = ReadFile(std::string(TAILNOISE_FIXTURE_DIR) + "/hotspot_safepoint.log");
  const auto parsed = ParseHotspotSafepointLog(log, ParseLogOrigin("uptime:0s"));
  const auto& first = parsed.events.at(0);
  std::vector<LatencySample> v;
  for (int i = 0; i < 1000; ++i) v.push_back({0, TxnType::kNoOp, i * 100, 50, SampleStatus::kOk});
  v.push_back({1, TxnType::kNoOp, first.start_ns - 1000, first.duration_ns + 2000, SampleStatus::kOk});
  WriteFile(Path("trace.csv"), EncodeTrace(LatencyTrace({}, v)));
  WriteFile(Path("jvm.log"), log);
  const CliResult r = Cli({"attribute", "--trace", Path("trace.csv"), "--jvm-log", Path("jvm.log"),
                           "--origin", "uptime:0s", "--tail-pct", "99.9", "--out", Path("at")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json a = json::parse(ReadFile(Path("at/attribution.json")));
  EXPECT_TRUE(a.at("max_overlapped").get<bool>());
  EXPECT_EQ(a.at("max_event_kind"), first.kind);
  EXPECT_EQ(a.at("attribution_fraction").get<double>(), 1.0);
  // Without run metadata a wall-clock origin must be given explicitly.
  EXPECT_EQ(Cli({"attribute", "--trace", Path("trace.csv"), "--jvm-log", Path("jvm.log"), "--out", Path("x")})
                .code,
            kExitUsage);
}

}  // namespace
}  // namespace tailnoise
