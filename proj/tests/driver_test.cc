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

#include "json.hpp"
#include "tailnoise/analysis.h"
#include "tailnoise/clock.h"
#include "tailnoise/config.h"
#include "tailnoise/driver.h"
#include "tailnoise/errors.h"

namespace tailnoise {
namespace {

using nlohmann::json;

constexpr int64_t kMs = 1'000'000;

BenchmarkConfig ShortConfig(BackendKind backend, uint32_t workers, int64_t measure_ns) {
  BenchmarkConfig c;
  c.backend.kind = backend;
  c.workers = workers;
  c.warmup_ns = 50 * kMs;
  c.measure_ns = measure_ns;
  return c;
}

// A backend that answers instantly and records nothing.
class InstantBackend final : public Backend {
 public:
  Response Execute(const Request&) override { return {}; }
  BackendCapabilities capabilities() const override { return {}; }
  std::string name() const override { return "instant"; }
};

TEST(IssueAndMeasureTest, GateExtendsRecordedLatency) {
  InstantBackend backend;
  const int64_t origin = MonotonicNanos();
  NoiseGate gate({{0, 30 * kMs, NoiseEvent::Source::kInjected, "p"}});
  const LatencySample s = IssueAndMeasure(backend, NoOpRequest(), 3, origin, &gate);
  EXPECT_EQ(s.worker_id, 3u);
  EXPECT_TRUE(s.ok());
  EXPECT_GE(s.end_ns(), 30 * kMs);
  const LatencySample quick = IssueAndMeasure(backend, NoOpRequest(), 3, origin, nullptr);
  EXPECT_LT(quick.latency_ns, 5 * kMs);
}

TEST(DriverTest, StubRunIsClosedLoopAndSkipsWarmup) {
  BenchmarkConfig c = ShortConfig(BackendKind::kStub, 4, 500 * kMs);
  c.backend.service = ServiceModel::Fixed(200'000);
  const RunArtifacts run = RunBenchmark(c);
  ASSERT_FALSE(run.trace.empty());
  EXPECT_FALSE(run.trace.FindClosedLoopViolation().has_value());
  for (const auto& s : run.trace.samples()) {
    EXPECT_GE(s.start_ns, c.warmup_ns);
    EXPECT_LT(s.start_ns, c.warmup_ns + c.measure_ns);
    EXPECT_GE(s.latency_ns, 200'000);
    EXPECT_LT(s.worker_id, 4u);
  }
  EXPECT_EQ(run.run_meta.workers, 4u);
  EXPECT_EQ(run.run_meta.backend, "stub");
  EXPECT_FALSE(run.run_meta.degraded);
  EXPECT_TRUE(run.injected_noise.empty());
  uint64_t total = 0;
  for (auto n : run.throughput_series) total += n;
  EXPECT_EQ(total, run.trace.size());
  EXPECT_NE(run.run_meta.wallclock_origin_ns, 0);
}

TEST(DriverTest, EchoRunWithOneWorker) {
  const RunArtifacts run = RunBenchmark(ShortConfig(BackendKind::kEcho, 1, 300 * kMs));
  ASSERT_GT(run.trace.size(), 10u);
  EXPECT_FALSE(run.trace.FindClosedLoopViolation().has_value());
  for (const auto& s : run.trace.samples()) EXPECT_TRUE(s.ok());
}

TEST(DriverTest, InjectedPauseBeforeRecordShowsUpInLatency) {
  BenchmarkConfig c = ShortConfig(BackendKind::kStub, 4, 400 * kMs);
  c.warmup_ns = 0;
  c.backend.service = ServiceModel::Fixed(100'000);
  c.noise = PauseModel::Periodic(200 * kMs, 50 * kMs);
  c.noise.inject_point = InjectPoint::kBeforeRecord;
  const RunArtifacts run = RunBenchmark(c);
  ASSERT_EQ(run.injected_noise.size(), 1u);
  EXPECT_EQ(run.injected_noise[0].start_ns, 200 * kMs);
  int long_ones = 0;
  for (const auto& s : run.trace.samples()) long_ones += s.latency_ns >= 45 * kMs;
  EXPECT_GE(long_ones, 1);
  EXPECT_NE(run.run_meta.noise_model.find("before_record"), std::string::npos);
}

TEST(DriverTest, BeforeSendPauseLeavesNoSamplesInsideEvent) {
  BenchmarkConfig c = ShortConfig(BackendKind::kStub, 2, 400 * kMs);
  c.warmup_ns = 0;
  c.backend.service = ServiceModel::Fixed(100'000);
  c.noise = PauseModel::Periodic(200 * kMs, 50 * kMs);
  c.noise.inject_point = InjectPoint::kBeforeSend;
  const RunArtifacts run = RunBenchmark(c);
  const auto& e = run.injected_noise.at(0);
  // A worker that passed the gate just before the event may still start a
  // request at its very beginning; after that, nothing is issued.
  for (const auto& s : run.trace.samples()) {
    EXPECT_FALSE(s.start_ns >= e.start_ns + 5 * kMs && s.start_ns < e.end_ns()) << s.start_ns;
  }
}

TEST(DriverTest, UnreachableBackendFailsBeforeStart) {
  BenchmarkConfig c = ShortConfig(BackendKind::kEcho, 2, 100 * kMs);
  Endpoint dead;
  {
    Listener l(Endpoint{"127.0.0.1", 0});
    dead.port = l.port();
  }
  c.backend.echo_address = dead;
  EXPECT_THROW(RunBenchmark(c), BackendError);
}

TEST(DriverTest, ErrorsMarkRunDegraded) {
  class Failing final : public Backend {
   public:
    Response Execute(const Request&) override {
      WaitUntil(MonotonicNanos() + 100'000);
      return Response::Error("nope");
    }
    BackendCapabilities capabilities() const override { return {}; }
    std::string name() const override { return "failing"; }
  };
  BenchmarkConfig c = ShortConfig(BackendKind::kStub, 1, 100 * kMs);
  const RunArtifacts run =
      RunBenchmark(c, [](uint32_t) -> std::unique_ptr<Backend> { return std::make_unique<Failing>(); });
  EXPECT_TRUE(run.run_meta.degraded);
  ASSERT_FALSE(run.trace.empty());
  EXPECT_FALSE(run.trace.samples()[0].ok());
}

TEST(DriverTest, RequestStreamsArePureFunctionsOfConfig) {
  BenchmarkConfig c;
  c.benchmark = BenchmarkKind::kYcsb;
  c.ycsb.record_count = 1000;
  c.workers = 3;
  auto a = MakeRequestSource(c, 1, nullptr);
  auto b = MakeRequestSource(c, 1, nullptr);
  auto other = MakeRequestSource(c, 2, nullptr);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const Request r = a->Next();
    EXPECT_EQ(r, b->Next());
    differs |= !(r == other->Next());
  }
  EXPECT_TRUE(differs);
}

TEST(ConfigTest, DefaultsAndDurations) {
  const BenchmarkConfig c = ConfigFromJson(json::parse(R"({"benchmark":"ycsb","backend":{"kind":"stub"},
      "warmup":"1.5s","measure":2000000000,"workers":3,"noise":"periodic:1s:50ms"})"));
  EXPECT_EQ(c.benchmark, BenchmarkKind::kYcsb);
  EXPECT_EQ(c.warmup_ns, 1'500'000'000);
  EXPECT_EQ(c.measure_ns, 2'000'000'000);
  EXPECT_EQ(c.workers, 3u);
  EXPECT_EQ(c.ycsb.record_count, 1'200'000u);
  EXPECT_EQ(c.noise.kind, PauseModel::Kind::kPeriodic);
  EXPECT_EQ(c.backend.sql.isolation, "serializable");
  const BenchmarkConfig d = ConfigFromJson(json::object());
  EXPECT_EQ(d.workers, 10u);
  EXPECT_EQ(d.warmup_ns, 10'000'000'000);
  EXPECT_EQ(d.measure_ns, 60'000'000'000);
}

TEST(ConfigTest, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(ConfigFromJson(json::parse(R"({"wrokers":3})")), ConfigError);
  EXPECT_THROW(ConfigFromJson(json::parse(R"({"backend":{"kind":"stub","colour":1}})")), ConfigError);
  EXPECT_THROW(ConfigFromJson(json::parse(R"({"workers":0})")), ConfigError);
  EXPECT_THROW(ConfigFromJson(json::parse(R"({"measure":"soon"})")), ConfigError);
  EXPECT_THROW(ConfigFromJson(json::parse(R"({"noise":"sometimes"})")), ConfigError);
  EXPECT_THROW(ConfigFromJson(json::parse(R"({"benchmark":"tpcc","backend":{"kind":"sql"}})")), ConfigError);
  EXPECT_THROW(ConfigFromJson(json::parse(R"({"workload":{"mix":{"Read":1}}})")), ConfigError);
  EXPECT_THROW(ConfigFromJson(json::parse(R"({"benchmark":"ycsb","workload":{"mix":{"NewOrder":1}}})")),
               ConfigError);
}

TEST(ConfigTest, RoundTripReproducesRequestStreams) {
  const BenchmarkConfig c = ConfigFromJson(json::parse(R"({"benchmark":"ycsb","workers":2,"seed":42,
      "workload":{"record_count":5000,"mix":{"Scan":0.3,"Read":0.5,"Update":0.2}},
      "noise":{"model":"generational","inject_point":"both"}})"));
  const BenchmarkConfig again = ConfigFromJson(ConfigToJson(c));
  EXPECT_EQ(ConfigToJson(again), ConfigToJson(c));
  EXPECT_EQ(again.noise.inject_point, InjectPoint::kBoth);
  for (uint32_t w = 0; w < 2; ++w) {
    auto a = MakeRequestSource(c, w, nullptr);
    auto b = MakeRequestSource(again, w, nullptr);
    for (int i = 0; i < 500; ++i) ASSERT_EQ(a->Next(), b->Next());
  }
}

}  // namespace
}  // namespace tailnoise
