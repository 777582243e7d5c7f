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
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tailnoise {

// One harness-side pause. Times are nanoseconds on the run's time base.
struct NoiseEvent {
  enum class Source : uint8_t { kInjected, kJvmLog };

  int64_t start_ns = 0;
  int64_t duration_ns = 1;
  Source source = Source::kInjected;
  std::string kind;

  int64_t end_ns() const { return start_ns + duration_ns; }

  friend bool operator==(const NoiseEvent&, const NoiseEvent&) = default;
};

std::string_view SourceLabel(NoiseEvent::Source s);

// Where a worker consults the pause gate. kBeforeSend checks before a
// request is generated (outside the measured window); kBeforeRecord checks
// after the response arrives and before the end timestamp is taken.
enum class InjectPoint : uint8_t { kBeforeSend, kBeforeRecord, kBoth };

std::string_view InjectPointLabel(InjectPoint p);
InjectPoint ParseInjectPoint(std::string_view text);

struct PauseModel {
  enum class Kind : uint8_t { kOff, kPeriodic, kPoisson, kGenerational };

  Kind kind = Kind::kOff;
  // Periodic: a pause starts at every positive multiple of period_ns.
  int64_t period_ns = 1'000'000'000;
  int64_t duration_ns = 50'000'000;
  // Poisson: arrivals at rate_per_s; durations fixed (duration_ns) or
  // lognormal in ln(ns) when lognormal is set.
  double rate_per_s = 1;
  bool lognormal = false;
  double mu = 0;
  double sigma = 0;
  // Generational: independent minor and major Poisson streams with fixed
  // durations.
  double minor_rate_per_s = 1;
  int64_t minor_duration_ns = 5'000'000;
  double major_rate_per_s = 1.0 / 60;
  int64_t major_duration_ns = 50'000'000;

  InjectPoint inject_point = InjectPoint::kBeforeRecord;

  static PauseModel Off() { return {}; }
  static PauseModel Periodic(int64_t period_ns, int64_t duration_ns);
  static PauseModel Poisson(double rate_per_s, int64_t duration_ns);
  static PauseModel Generational();

  // Throws ValidationError on non-positive durations or negative rates.
  void Validate() const;

  // Textual form accepted by ParsePauseModel.
  std::string Describe() const;
};

// Grammar:
//   off
//   periodic:<period>:<duration>
//   poisson:<rate>:<duration>
//   poisson:<rate>:lognormal:<mu>:<sigma>
//   generational[:<minor_rate>:<minor_duration>:<major_rate>:<major_duration>]
// Rates are per second and may be written as a fraction ("1/60").
// Durations use ParseDuration syntax. Throws ParseError.
PauseModel ParsePauseModel(std::string_view text);

// Draws pauses over [0, horizon_ns). Events are sorted; overlapping draws
// are merged into one event. Deterministic for a given seed.
std::vector<NoiseEvent> GenerateNoiseSchedule(const PauseModel& model, int64_t horizon_ns,
                                              uint64_t seed);

// Shared, read-only view of a pause schedule that workers consult.
class NoiseGate {
 public:
  // Throws ValidationError if events are unsorted or overlap.
  explicit NoiseGate(std::vector<NoiseEvent> events);

  // `now_ns` is on the run's time base; `origin_ns` maps it to the
  // monotonic clock. If now falls inside [start, end) of an event, blocks
  // until its end. Returns the resume time on the run's time base (now_ns
  // when not blocked). Safe for concurrent callers.
  int64_t Wait(int64_t now_ns, int64_t origin_ns) const;

  // Index of the event containing t, or -1.
  std::ptrdiff_t Find(int64_t t) const;

  std::span<const NoiseEvent> events() const { return events_; }

 private:
  std::vector<NoiseEvent> events_;
};

}  // namespace tailnoise
