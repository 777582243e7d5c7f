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
#include <functional>
#include <memory>
#include <vector>

#include "tailnoise/backends.h"
#include "tailnoise/config.h"
#include "tailnoise/model.h"
#include "tailnoise/noise.h"

namespace tailnoise {

struct RunArtifacts {
  // Measurement-phase samples only.
  LatencyTrace trace;
  // Requests started in each second of the measurement phase.
  std::vector<uint64_t> throughput_series;
  // The exact schedule the gate enforced; empty when the injector is off.
  std::vector<NoiseEvent> injected_noise;
  RunMeta run_meta;
};

// Times one request. start is taken right before Execute; end after the
// response is processed and after the gate, if the gate is consulted
// before recording. `gate`, when given, is consulted after the response
// arrives. Times are relative to origin_ns on the monotonic clock.
LatencySample IssueAndMeasure(Backend& backend, const Request& request, uint32_t worker_id,
                              int64_t origin_ns, const NoiseGate* gate = nullptr);

using BackendFactory = std::function<std::unique_ptr<Backend>(uint32_t worker_id)>;

// Closed-loop run: `workers` threads each generate, issue and record one
// request at a time until warm-up plus measurement have elapsed. Samples
// that start during warm-up are dropped. Throws BackendError if any
// worker's backend cannot be set up; nothing runs in that case.
RunArtifacts RunBenchmark(const BenchmarkConfig& config);

// Same, with backends supplied by the caller.
RunArtifacts RunBenchmark(const BenchmarkConfig& config, const BackendFactory& make_backend);

// Request generator for one worker, as RunBenchmark builds it.
std::unique_ptr<RequestSource> MakeRequestSource(const BenchmarkConfig& config, uint32_t worker_id,
                                                 std::shared_ptr<const ZipfianDistribution> keys);

// Seed of the injected pause schedule for a run seed.
uint64_t NoiseSeed(uint64_t run_seed);

}  // namespace tailnoise
