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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tailnoise/backends.h"
#include "tailnoise/noise.h"
#include "tailnoise/pg_client.h"
#include "tailnoise/socket_util.h"
#include "tailnoise/workload.h"

namespace tailnoise {

enum class BenchmarkKind : uint8_t { kNoOp, kYcsb, kTpcc };
enum class BackendKind : uint8_t { kStub, kEcho, kSql };

std::string_view BenchmarkLabel(BenchmarkKind k);
std::string_view BackendLabel(BackendKind k);

struct BackendConfig {
  BackendKind kind = BackendKind::kStub;

  // stub
  ServiceModel service = ServiceModel::Fixed(100'000);
  int64_t spin_window_ns = kDefaultSpinWindowNanos;

  // echo: connect to `echo_address`, or start an in-process server on an
  // ephemeral loopback port when it is unset.
  std::optional<Endpoint> echo_address;
  int64_t echo_reply_delay_ns = 0;

  // sql
  PgConnectOptions sql;
};

// Full description of one benchmark run. Defaults mirror the reference
// setup: 10 workers, 10 s warm-up, 60 s measurement.
struct BenchmarkConfig {
  BenchmarkKind benchmark = BenchmarkKind::kNoOp;
  BackendConfig backend;
  uint32_t workers = 10;
  int64_t warmup_ns = 10'000'000'000;
  int64_t measure_ns = 60'000'000'000;
  uint64_t seed = 1;
  YcsbOptions ycsb;
  TpccOptions tpcc;
  PauseModel noise;
  // Worker i is pinned to cpu_affinity[i % size] when non-empty.
  std::vector<int> cpu_affinity;
  // A run whose error fraction exceeds this is marked degraded.
  double error_threshold = 0.01;

  // Throws ConfigError.
  void Validate() const;
};

// Strict decoding: unknown keys, wrong types and invalid values raise
// ConfigError. Durations are strings with a unit suffix or integer ns.
BenchmarkConfig ConfigFromJson(const nlohmann::json& j);

// Effective configuration with defaults resolved and every duration as
// integer nanoseconds. ConfigFromJson(ConfigToJson(c)) reproduces c.
nlohmann::json ConfigToJson(const BenchmarkConfig& config);

// Reads a config file. A meta.json written by a previous run is accepted
// too; its embedded effective config is used.
BenchmarkConfig LoadConfig(const std::filesystem::path& path);

}  // namespace tailnoise
