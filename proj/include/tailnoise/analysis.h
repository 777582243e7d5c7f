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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tailnoise/model.h"
#include "tailnoise/noise.h"

namespace tailnoise {

// Nearest-rank percentile of an ascending sequence: the value at 1-based
// rank ceil(p/100 * n), with p = 0 mapping to the minimum. p is resolved to
// 1e-6 percentile points so that the rank is computed in exact integer
// arithmetic. Throws ValidationError for empty input or p outside [0, 100].
int64_t PercentileOfSorted(std::span<const int64_t> sorted, double p);

// Same, for unsorted input (copies and sorts).
int64_t Percentile(std::span<const int64_t> values, double p);

// The 1-based rank used by PercentileOfSorted.
std::size_t NearestRank(std::size_t n, double p);

struct LatencyStats {
  uint64_t count = 0;
  uint64_t error_count = 0;
  int64_t min = 0;
  int64_t p50 = 0;
  int64_t p95 = 0;
  int64_t p99 = 0;
  int64_t p999 = 0;
  int64_t p99975 = 0;
  int64_t max = 0;
  double overall_rps = 0;

  friend bool operator==(const LatencyStats&, const LatencyStats&) = default;
};

struct PercentileSummary {
  std::string benchmark;
  std::string backend;
  int64_t measure_ns = 0;
  bool include_errors = false;
  LatencyStats overall;
  std::map<std::string, LatencyStats> by_txn;

  friend bool operator==(const PercentileSummary&, const PercentileSummary&) = default;
};

// Percentiles over ok samples (all samples with include_errors), overall
// and per transaction type. Rates divide by the measurement length from the
// trace's RunMeta.
// Throws ValidationError if no sample qualifies.
PercentileSummary SummarizeRun(const LatencyTrace& trace, bool include_errors = false);

// Requests per bucket, indexed by floor((start - window_start) / bucket)
// where the window starts at the run's warm-up boundary. The series covers
// the measurement window and is extended if a sample lies beyond it.
// Throws ValidationError for bucket <= 0 or a sample before the window.
std::vector<uint64_t> ThroughputSeries(const LatencyTrace& trace,
                                       int64_t bucket_ns = 1'000'000'000);

struct DownsampleParams {
  double rate = 1e-5;
  double lower_pct = 0.025;
  double upper_pct = 99.975;
  uint64_t seed = 0;
  std::size_t window = 1000;

  // Throws ValidationError unless 0 < rate <= 1, 0 <= lower < upper <= 100
  // and window >= 1.
  void Validate() const;
};

// Rates and bounds used for the published time-series figures, keyed by
// benchmark and transaction label. Falls back to the NoOp settings.
DownsampleParams DefaultDownsampleParams(std::string_view benchmark, std::string_view txn);

struct PlotPoint {
  enum class Class : uint8_t { kStandard, kExtreme };
  int64_t t_ns = 0;
  int64_t latency_ns = 0;
  Class cls = Class::kStandard;

  friend bool operator==(const PlotPoint&, const PlotPoint&) = default;
};

struct MeanPoint {
  int64_t t_ns = 0;
  double mean_ns = 0;
};

struct PlotSeries {
  std::vector<PlotPoint> points;
  std::vector<MeanPoint> sliding_mean;
  int64_t lower_bound_ns = 0;
  int64_t upper_bound_ns = 0;
  std::size_t source_count = 0;
};

// Keeps every ok sample above percentile(upper_pct) or below
// percentile(lower_pct) as extreme, and each remaining one independently
// with probability `rate` as standard. The sliding mean runs over all
// selected samples in start order. When `txn` is set, only that type is
// considered and the bounds are computed over it alone.
PlotSeries DownsampleForPlot(const LatencyTrace& trace, const DownsampleParams& params,
                             std::optional<TxnType> txn = std::nullopt);

// Trailing mean: out[i] = mean(values[max(0, i - window + 1) .. i]).
// window must be >= 1.
std::vector<double> SlidingMean(std::span<const int64_t> values, std::size_t window);

struct SampleAttribution {
  bool overlapped = false;
  // Index into the event list, or -1.
  int32_t event_index = -1;
};

struct AttributionReport {
  std::vector<SampleAttribution> flags;
  double tail_pct = 99.9;
  int64_t tail_threshold_ns = 0;
  uint64_t tail_samples = 0;
  uint64_t tail_overlapped = 0;
  double attribution_fraction = 0;
  bool no_noise = false;
  int64_t max_latency_ns = 0;
  bool max_overlapped = false;
  std::string max_event_kind;
  // Events whose interval intersects the trace's time span, and how many
  // of those overlap at least one sample.
  uint64_t events_in_span = 0;
  uint64_t events_in_span_overlapped = 0;
  // Per tail sample event kinds, e.g. {"major": 12, "minor": 40}.
  std::map<std::string, uint64_t> tail_by_kind;
};

// A sample is overlapped iff [start, start + latency) intersects some
// [event.start, event.end). Zero-latency samples count as the point at
// start. The tail is the ok samples with latency > percentile(tail_pct).
// Throws ValidationError if events are not sorted by start.
AttributionReport AttributeNoise(const LatencyTrace& trace, std::span<const NoiseEvent> events,
                                 double tail_pct);

struct DistortionReport {
  double p50_ratio = 1;
  double p95_ratio = 1;
  double p99_ratio = 1;
  double max_ratio = 1;
  double throughput_ratio = 1;
  bool tail_only = false;
  std::vector<std::string> warnings;
};

// Ratios perturbed / baseline. tail_only is set when the max ratio is at
// least 10 while the p50 and p95 ratios stay within 1.2.
DistortionReport CompareRuns(const PercentileSummary& baseline, const PercentileSummary& perturbed);

}  // namespace tailnoise
