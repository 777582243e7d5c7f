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

#include "tailnoise/analysis.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tailnoise/errors.h"
#include "tailnoise/workload.h"

namespace tailnoise {

std::size_t NearestRank(std::size_t n, double p) {
  if (!(p >= 0 && p <= 100)) throw ValidationError("percentile must be in [0, 100]");
  if (n == 0) throw ValidationError("percentile of an empty sequence");
  const auto micro = static_cast<unsigned __int128>(std::llround(p * 1e6));
  constexpr unsigned __int128 kScale = 100'000'000;  // 100 percent in micro-points
  const auto rank = static_cast<std::size_t>((micro * n + kScale - 1) / kScale);
  return std::clamp<std::size_t>(rank, 1, n);
}

int64_t PercentileOfSorted(std::span<const int64_t> sorted, double p) {
  return sorted[NearestRank(sorted.size(), p) - 1];
}

int64_t Percentile(std::span<const int64_t> values, double p) {
  std::vector<int64_t> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return PercentileOfSorted(sorted, p);
}

namespace {

LatencyStats StatsOf(std::vector<int64_t>& latencies, uint64_t errors, double measure_s) {
  LatencyStats s;
  s.error_count = errors;
  s.count = latencies.size();
  if (latencies.empty()) return s;
  std::sort(latencies.begin(), latencies.end());
  s.min = latencies.front();
  s.p50 = PercentileOfSorted(latencies, 50);
  s.p95 = PercentileOfSorted(latencies, 95);
  s.p99 = PercentileOfSorted(latencies, 99);
  s.p999 = PercentileOfSorted(latencies, 99.9);
  s.p99975 = PercentileOfSorted(latencies, 99.975);
  s.max = latencies.back();
  s.overall_rps = static_cast<double>(s.count) / measure_s;
  return s;
}

}  // namespace

PercentileSummary SummarizeRun(const LatencyTrace& trace, bool include_errors) {
  const RunMeta& meta = trace.meta();
  if (meta.measure_ns <= 0) throw ValidationError("trace has no measurement length");
  PercentileSummary summary;
  summary.benchmark = meta.benchmark;
  summary.backend = meta.backend;
  summary.measure_ns = meta.measure_ns;
  summary.include_errors = include_errors;

  struct Bucket {
    std::vector<int64_t> latencies;
    uint64_t errors = 0;
  };
  Bucket all;
  std::map<std::string, Bucket> by_txn;
  all.latencies.reserve(trace.size());
  for (const auto& s : trace.samples()) {
    auto& b = by_txn[std::string(s.txn.label())];
    if (!s.ok()) {
      ++all.errors;
      ++b.errors;
      if (!include_errors) continue;
    }
    all.latencies.push_back(s.latency_ns);
    b.latencies.push_back(s.latency_ns);
  }
  if (all.latencies.empty()) throw ValidationError("no samples to summarize");
  const double measure_s = meta.measure_s();
  summary.overall = StatsOf(all.latencies, all.errors, measure_s);
  for (auto& [label, b] : by_txn) summary.by_txn[label] = StatsOf(b.latencies, b.errors, measure_s);
  return summary;
}

std::vector<uint64_t> ThroughputSeries(const LatencyTrace& trace, int64_t bucket_ns) {
  if (bucket_ns <= 0) throw ValidationError("bucket must be > 0");
  const int64_t window_start = trace.meta().warmup_ns;
  const int64_t measure = std::max<int64_t>(trace.meta().measure_ns, 0);
  std::vector<uint64_t> series(static_cast<std::size_t>((measure + bucket_ns - 1) / bucket_ns), 0);
  for (const auto& s : trace.samples()) {
    if (s.start_ns < window_start) {
      throw ValidationError("sample at " + std::to_string(s.start_ns) +
                            "ns precedes the measurement window");
    }
    const auto idx = static_cast<std::size_t>((s.start_ns - window_start) / bucket_ns);
    if (idx >= series.size()) series.resize(idx + 1, 0);
    ++series[idx];
  }
  return series;
}

void DownsampleParams::Validate() const {
  if (!(rate > 0 && rate <= 1)) throw ValidationError("sampling rate must be in (0, 1]");
  if (!(lower_pct >= 0 && upper_pct <= 100 && lower_pct < upper_pct)) {
    throw ValidationError("extreme bounds need 0 <= lower < upper <= 100");
  }
  if (window < 1) throw ValidationError("sliding window must be >= 1");
}

DownsampleParams DefaultDownsampleParams(std::string_view benchmark, std::string_view txn) {
  DownsampleParams p;
  if (benchmark == "ycsb") {
    p.rate = txn == "Update" ? 0.001 : 0.0005;
  } else if (benchmark == "tpcc") {
    p.lower_pct = 0.25;
    p.upper_pct = 99.75;
    p.rate = txn == "OrderStatus" ? 0.05 : 0.005;
  }
  return p;
}

PlotSeries DownsampleForPlot(const LatencyTrace& trace, const DownsampleParams& params,
                             std::optional<TxnType> txn) {
  params.Validate();
  std::vector<const LatencySample*> selected;
  selected.reserve(trace.size());
  for (const auto& s : trace.samples()) {
    if (!s.ok()) continue;
    if (txn && s.txn != *txn) continue;
    selected.push_back(&s);
  }
  PlotSeries out;
  out.source_count = selected.size();
  if (selected.empty()) return out;

  std::vector<int64_t> latencies;
  latencies.reserve(selected.size());
  for (const auto* s : selected) latencies.push_back(s->latency_ns);
  {
    std::vector<int64_t> sorted = latencies;
    std::sort(sorted.begin(), sorted.end());
    out.lower_bound_ns = PercentileOfSorted(sorted, params.lower_pct);
    out.upper_bound_ns = PercentileOfSorted(sorted, params.upper_pct);
  }

  Rng rng(params.seed);
  for (const auto* s : selected) {
    if (s->latency_ns > out.upper_bound_ns || s->latency_ns < out.lower_bound_ns) {
      out.points.push_back({s->start_ns, s->latency_ns, PlotPoint::Class::kExtreme});
    } else if (UniformUnit(rng) < params.rate) {
      out.points.push_back({s->start_ns, s->latency_ns, PlotPoint::Class::kStandard});
    }
  }

  const auto means = SlidingMean(latencies, params.window);
  out.sliding_mean.reserve(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) {
    out.sliding_mean.push_back({selected[i]->start_ns, means[i]});
  }
  return out;
}

std::vector<double> SlidingMean(std::span<const int64_t> values, std::size_t window) {
  if (window < 1) throw ValidationError("sliding window must be >= 1");
  std::vector<double> out(values.size());
  // Integer running sum keeps every mean exact up to the final division.
  __int128 sum = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    if (i >= window) sum -= values[i - window];
    const std::size_t n = std::min(i + 1, window);
    out[i] = static_cast<double>(static_cast<long double>(sum) / static_cast<long double>(n));
  }
  return out;
}

namespace {

// Prefix maximum of interval ends over intervals sorted by start, with the
// index that attains it. Answers "does any interval with start < b end
// after a" in O(log n).
class OverlapIndex {
 public:
  template <typename Range, typename StartFn, typename EndFn>
  OverlapIndex(const Range& items, StartFn start, EndFn end) {
    starts_.reserve(items.size());
    max_end_.reserve(items.size());
    argmax_.reserve(items.size());
    int64_t best = std::numeric_limits<int64_t>::min();
    int32_t best_idx = -1;
    for (std::size_t i = 0; i < items.size(); ++i) {
      starts_.push_back(start(items[i]));
      if (end(items[i]) > best) {
        best = end(items[i]);
        best_idx = static_cast<int32_t>(i);
      }
      max_end_.push_back(best);
      argmax_.push_back(best_idx);
    }
  }

  // Index of an interval intersecting [a, b), or -1.
  int32_t Find(int64_t a, int64_t b) const {
    const auto k = std::lower_bound(starts_.begin(), starts_.end(), b) - starts_.begin();
    if (k == 0) return -1;
    return max_end_[static_cast<std::size_t>(k - 1)] > a ? argmax_[static_cast<std::size_t>(k - 1)]
                                                         : -1;
  }

 private:
  std::vector<int64_t> starts_;
  std::vector<int64_t> max_end_;
  std::vector<int32_t> argmax_;
};

// Half-open interval covered by a sample; a zero-latency sample is the
// single nanosecond at its start.
int64_t SampleEnd(const LatencySample& s) { return s.start_ns + std::max<int64_t>(s.latency_ns, 1); }

}  // namespace

AttributionReport AttributeNoise(const LatencyTrace& trace, std::span<const NoiseEvent> events,
                                 double tail_pct) {
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].start_ns < events[i - 1].start_ns) {
      throw ValidationError("noise events must be sorted by start");
    }
  }
  AttributionReport report;
  report.tail_pct = tail_pct;
  report.no_noise = events.empty();
  const auto samples = trace.samples();

  const OverlapIndex event_index(
      events, [](const NoiseEvent& e) { return e.start_ns; },
      [](const NoiseEvent& e) { return e.end_ns(); });
  report.flags.resize(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const int32_t hit = event_index.Find(samples[i].start_ns, SampleEnd(samples[i]));
    report.flags[i] = {hit >= 0, hit};
  }

  std::vector<int64_t> ok_latencies;
  ok_latencies.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.ok()) ok_latencies.push_back(s.latency_ns);
  }
  if (!ok_latencies.empty()) {
    report.tail_threshold_ns = Percentile(ok_latencies, tail_pct);
    std::size_t max_idx = samples.size();
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto& s = samples[i];
      if (!s.ok()) continue;
      if (max_idx == samples.size() || s.latency_ns > samples[max_idx].latency_ns) max_idx = i;
      if (s.latency_ns <= report.tail_threshold_ns) continue;
      ++report.tail_samples;
      if (report.flags[i].overlapped) {
        ++report.tail_overlapped;
        ++report.tail_by_kind[events[static_cast<std::size_t>(report.flags[i].event_index)].kind];
      }
    }
    report.max_latency_ns = samples[max_idx].latency_ns;
    report.max_overlapped = report.flags[max_idx].overlapped;
    if (report.max_overlapped) {
      report.max_event_kind = events[static_cast<std::size_t>(report.flags[max_idx].event_index)].kind;
    }
  }
  if (report.tail_samples > 0) {
    report.attribution_fraction =
        static_cast<double>(report.tail_overlapped) / static_cast<double>(report.tail_samples);
  }

  if (!samples.empty()) {
    int64_t span_begin = samples.front().start_ns;
    int64_t span_end = span_begin;
    for (const auto& s : samples) span_end = std::max(span_end, SampleEnd(s));
    const OverlapIndex sample_index(
        samples, [](const LatencySample& s) { return s.start_ns; }, SampleEnd);
    for (const auto& e : events) {
      if (e.end_ns() <= span_begin || e.start_ns >= span_end) continue;
      ++report.events_in_span;
      if (sample_index.Find(e.start_ns, e.end_ns()) >= 0) ++report.events_in_span_overlapped;
    }
  }
  return report;
}

namespace {

double Ratio(double perturbed, double baseline) {
  if (baseline == 0) {
    return perturbed == 0 ? 1.0 : std::numeric_limits<double>::infinity();
  }
  return perturbed / baseline;
}

}  // namespace

DistortionReport CompareRuns(const PercentileSummary& baseline, const PercentileSummary& perturbed) {
  DistortionReport r;
  const auto& b = baseline.overall;
  const auto& p = perturbed.overall;
  r.p50_ratio = Ratio(static_cast<double>(p.p50), static_cast<double>(b.p50));
  r.p95_ratio = Ratio(static_cast<double>(p.p95), static_cast<double>(b.p95));
  r.p99_ratio = Ratio(static_cast<double>(p.p99), static_cast<double>(b.p99));
  r.max_ratio = Ratio(static_cast<double>(p.max), static_cast<double>(b.max));
  r.throughput_ratio = Ratio(p.overall_rps, b.overall_rps);
  r.tail_only = r.max_ratio >= 10 && r.p50_ratio <= 1.2 && r.p95_ratio <= 1.2;
  if (baseline.benchmark != perturbed.benchmark) {
    r.warnings.push_back("benchmarks differ: " + baseline.benchmark + " vs " + perturbed.benchmark);
  }
  if (baseline.backend != perturbed.backend) {
    r.warnings.push_back("backends differ: " + baseline.backend + " vs " + perturbed.backend);
  }
  if (baseline.include_errors != perturbed.include_errors) {
    r.warnings.push_back("one summary includes error samples and the other does not");
  }
  return r;
}

}  // namespace tailnoise
