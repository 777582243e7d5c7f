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

#include "tailnoise/driver.h"

#include <pthread.h>
#include <sched.h>

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "tailnoise/analysis.h"
#include "tailnoise/clock.h"
#include "tailnoise/duration.h"
#include "tailnoise/echo.h"
#include "tailnoise/errors.h"
#include "tailnoise/pg_client.h"

namespace tailnoise {

namespace {

// Lead time between spawning the workers and trace time 0.
constexpr int64_t kStartLeadNanos = 5'000'000;

bool GateBeforeSend(InjectPoint p) { return p != InjectPoint::kBeforeRecord; }
bool GateBeforeRecord(InjectPoint p) { return p != InjectPoint::kBeforeSend; }

std::string PinToCpu(int cpu) {
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(cpu, &set);
  const int rc = pthread_setaffinity_np(pthread_self(), sizeof(set), &set);
  return rc == 0 ? std::string() : "cannot pin to cpu " + std::to_string(cpu);
}

}  // namespace

uint64_t NoiseSeed(uint64_t run_seed) { return DeriveSeed(run_seed, 0x6e6f697365ULL); }

LatencySample IssueAndMeasure(Backend& backend, const Request& request, uint32_t worker_id,
                              int64_t origin_ns, const NoiseGate* gate) {
  LatencySample s;
  s.worker_id = worker_id;
  s.txn = request.txn;
  s.start_ns = MonotonicNanos() - origin_ns;
  const Response response = backend.Execute(request);
  if (gate != nullptr) gate->Wait(MonotonicNanos() - origin_ns, origin_ns);
  s.latency_ns = MonotonicNanos() - origin_ns - s.start_ns;
  s.status = response.status;
  return s;
}

std::unique_ptr<RequestSource> MakeRequestSource(const BenchmarkConfig& config, uint32_t worker_id,
                                                 std::shared_ptr<const ZipfianDistribution> keys) {
  const uint64_t seed = DeriveSeed(config.seed, worker_id);
  switch (config.benchmark) {
    case BenchmarkKind::kNoOp:
      return std::make_unique<NoOpSource>();
    case BenchmarkKind::kYcsb: {
      if (!keys) {
        keys = std::make_shared<ZipfianDistribution>(config.ycsb.record_count, config.ycsb.zipfian_s);
      }
      return std::make_unique<YcsbGenerator>(config.ycsb, std::move(keys), worker_id, config.workers,
                                             seed);
    }
    case BenchmarkKind::kTpcc:
      return std::make_unique<TpccGenerator>(
          config.tpcc, AssignWarehouses(config.tpcc.warehouses, config.workers), worker_id, seed);
  }
  throw ConfigError("unknown benchmark");
}

RunArtifacts RunBenchmark(const BenchmarkConfig& config) {
  config.Validate();
  std::unique_ptr<EchoServer> embedded;
  Endpoint echo_endpoint;
  if (config.backend.kind == BackendKind::kEcho) {
    if (config.backend.echo_address) {
      echo_endpoint = *config.backend.echo_address;
    } else {
      embedded = std::make_unique<EchoServer>(Endpoint{"127.0.0.1", 0},
                                              config.backend.echo_reply_delay_ns);
      echo_endpoint = embedded->endpoint();
    }
  }
  const BackendFactory factory = [&](uint32_t worker) -> std::unique_ptr<Backend> {
    switch (config.backend.kind) {
      case BackendKind::kStub:
        return std::make_unique<StubBackend>(config.backend.service,
                                             DeriveSeed(config.seed, 1000 + worker),
                                             config.backend.spin_window_ns);
      case BackendKind::kEcho:
        return std::make_unique<EchoBackend>(echo_endpoint);
      case BackendKind::kSql:
        return std::make_unique<PgBackend>(config.backend.sql);
    }
    return nullptr;
  };
  RunArtifacts artifacts = RunBenchmark(config, factory);
  if (embedded) {
    embedded->Stop();
    artifacts.run_meta.notes.push_back("echo server: in-process on " + echo_endpoint.ToString());
    artifacts.trace = std::move(artifacts.trace).WithMeta(artifacts.run_meta);
  }
  return artifacts;
}

RunArtifacts RunBenchmark(const BenchmarkConfig& config, const BackendFactory& make_backend) {
  config.Validate();

  RunMeta meta;
  meta.benchmark = std::string(BenchmarkLabel(config.benchmark));
  meta.backend = std::string(BackendLabel(config.backend.kind));
  meta.warmup_ns = config.warmup_ns;
  meta.measure_ns = config.measure_ns;
  meta.workers = config.workers;
  meta.seed = config.seed;
  meta.noise_model = config.noise.Describe();
  if (config.noise.kind != PauseModel::Kind::kOff) {
    meta.noise_model += "@" + std::string(InjectPointLabel(config.noise.inject_point));
  }

  // Everything that can fail happens before the clock starts.
  std::vector<std::unique_ptr<Backend>> backends;
  backends.reserve(config.workers);
  for (uint32_t w = 0; w < config.workers; ++w) {
    try {
      backends.push_back(make_backend(w));
    } catch (const Error& e) {
      throw BackendError("worker " + std::to_string(w) + ": " + e.what());
    }
  }
  std::shared_ptr<const ZipfianDistribution> keys;
  if (config.benchmark == BenchmarkKind::kYcsb) {
    keys = std::make_shared<ZipfianDistribution>(config.ycsb.record_count, config.ycsb.zipfian_s);
  }
  std::vector<std::unique_ptr<RequestSource>> sources;
  for (uint32_t w = 0; w < config.workers; ++w) sources.push_back(MakeRequestSource(config, w, keys));

  const int64_t end_ns = config.warmup_ns + config.measure_ns;
  std::vector<NoiseEvent> schedule =
      GenerateNoiseSchedule(config.noise, end_ns, NoiseSeed(config.seed));
  const NoiseGate gate(schedule);
  const bool gate_on = !schedule.empty();
  const NoiseGate* send_gate = gate_on && GateBeforeSend(config.noise.inject_point) ? &gate : nullptr;
  const NoiseGate* record_gate =
      gate_on && GateBeforeRecord(config.noise.inject_point) ? &gate : nullptr;

  const int64_t mono_now = MonotonicNanos();
  const int64_t wall_now = WallClockNanos();
  const int64_t origin_ns = mono_now + kStartLeadNanos;
  meta.wallclock_origin_ns = wall_now + kStartLeadNanos;

  std::vector<std::vector<LatencySample>> per_worker(config.workers);
  std::vector<std::string> failures(config.workers);
  std::vector<std::string> pin_notes(config.workers);
  std::vector<std::thread> threads;
  threads.reserve(config.workers);
  for (uint32_t w = 0; w < config.workers; ++w) {
    threads.emplace_back([&, w] {
      TightenTimerSlack();
      if (!config.cpu_affinity.empty()) {
        pin_notes[w] = PinToCpu(config.cpu_affinity[w % config.cpu_affinity.size()]);
      }
      Backend& backend = *backends[w];
      RequestSource& source = *sources[w];
      auto& samples = per_worker[w];
      WaitUntil(origin_ns);
      try {
        while (true) {
          int64_t now = MonotonicNanos() - origin_ns;
          if (now >= end_ns) break;
          if (send_gate != nullptr) {
            now = send_gate->Wait(now, origin_ns);
            if (now >= end_ns) break;
          }
          const Request request = source.Next();
          const LatencySample s = IssueAndMeasure(backend, request, w, origin_ns, record_gate);
          if (s.start_ns >= config.warmup_ns && s.start_ns < end_ns) samples.push_back(s);
        }
      } catch (const std::exception& e) {
        failures[w] = e.what();
      }
    });
  }
  for (auto& t : threads) t.join();
  backends.clear();

  std::vector<LatencyTrace> traces;
  traces.reserve(config.workers);
  for (auto& samples : per_worker) traces.emplace_back(meta, std::move(samples));
  LatencyTrace merged = MergeTraces(traces);
  traces.clear();

  uint64_t errors = 0;
  for (const auto& s : merged.samples()) errors += s.ok() ? 0 : 1;
  std::vector<std::string> notes;
  notes.push_back("connections: one dedicated " + meta.backend + " connection per worker");
  for (uint32_t w = 0; w < config.workers; ++w) {
    if (!pin_notes[w].empty()) notes.push_back("worker " + std::to_string(w) + ": " + pin_notes[w]);
  }
  if (!config.cpu_affinity.empty()) {
    std::string cpus;
    for (int c : config.cpu_affinity) cpus += (cpus.empty() ? "" : ",") + std::to_string(c);
    notes.push_back("cpu affinity: " + cpus);
  }
  bool degraded = false;
  for (uint32_t w = 0; w < config.workers; ++w) {
    if (!failures[w].empty()) {
      degraded = true;
      notes.push_back("worker " + std::to_string(w) + " aborted: " + failures[w]);
    }
  }
  const double error_rate = merged.empty() ? 0 : static_cast<double>(errors) / merged.size();
  if (error_rate > config.error_threshold) {
    degraded = true;
    notes.push_back("error rate " + std::to_string(error_rate) + " exceeds threshold");
  }
  if (merged.empty()) {
    degraded = true;
    notes.push_back("no samples recorded in the measurement phase");
  }

  RunArtifacts artifacts;
  artifacts.run_meta = meta;
  artifacts.run_meta.degraded = degraded;
  artifacts.run_meta.notes = std::move(notes);
  artifacts.trace = std::move(merged).WithMeta(artifacts.run_meta);
  artifacts.throughput_series = ThroughputSeries(artifacts.trace, kNanosPerSecond);
  artifacts.injected_noise = std::move(schedule);
  return artifacts;
}

}  // namespace tailnoise
