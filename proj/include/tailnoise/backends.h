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

#include "tailnoise/clock.h"
#include "tailnoise/workload.h"

namespace tailnoise {

struct Response {
  SampleStatus status = SampleStatus::kOk;
  int64_t rows_returned = 0;
  std::optional<std::string> server_message;

  bool ok() const { return status == SampleStatus::kOk; }
  static Response Error(std::string message) {
    return Response{SampleStatus::kError, 0, std::move(message)};
  }
};

struct BackendCapabilities {
  bool supports_sql = false;
  bool supports_scan = false;
};

// Execution target for requests. Execute() blocks until the full response
// has been received and processed; nothing is pipelined. Each instance is
// owned by exactly one worker.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual Response Execute(const Request& request) = 0;
  virtual BackendCapabilities capabilities() const = 0;
  virtual std::string name() const = 0;
};

// Synthetic service-time distribution for the stub backend.
struct ServiceModel {
  enum class Kind { kFixed, kLognormal, kBimodal };

  Kind kind = Kind::kFixed;
  int64_t fixed_ns = 100'000;
  // Parameters of ln(latency_ns).
  double mu = 0;
  double sigma = 0;
  int64_t fast_ns = 0;
  int64_t slow_ns = 0;
  double p_slow = 0;

  static ServiceModel Fixed(int64_t ns);
  static ServiceModel Lognormal(double mu, double sigma);
  static ServiceModel Bimodal(int64_t fast_ns, int64_t slow_ns, double p_slow);

  // Throws ValidationError on non-positive durations or p_slow outside [0, 1].
  void Validate() const;
  std::string Describe() const;
};

// Reproducible stream of service times drawn from a model.
class ServiceTimeSampler {
 public:
  ServiceTimeSampler(ServiceModel model, uint64_t seed);

  // Always >= 1.
  int64_t Next();

 private:
  ServiceModel model_;
  Rng rng_;
  std::normal_distribution<double> normal_;
};

// In-process backend that only burns a drawn service time. Waits use
// WaitUntil: sleep until `spin_window_ns` before the deadline, then spin.
class StubBackend final : public Backend {
 public:
  StubBackend(ServiceModel model, uint64_t seed,
              int64_t spin_window_ns = kDefaultSpinWindowNanos);

  Response Execute(const Request& request) override;
  BackendCapabilities capabilities() const override { return {false, true}; }
  std::string name() const override { return "stub"; }

 private:
  ServiceTimeSampler sampler_;
  int64_t spin_window_ns_;
};

}  // namespace tailnoise
