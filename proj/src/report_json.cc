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

#include "tailnoise/report_json.h"

#include <cmath>
#include <cstdio>

#include "tailnoise/errors.h"

namespace tailnoise {

using nlohmann::json;

namespace {

template <typename T>
T Field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("field '") + key + "' has the wrong type");
  }
}

json StatsToJson(const LatencyStats& s) {
  return {{"count", s.count},   {"error_count", s.error_count}, {"min", s.min},
          {"p50", s.p50},       {"p95", s.p95},                 {"p99", s.p99},
          {"p99.9", s.p999},    {"p99.975", s.p99975},          {"max", s.max},
          {"overall_rps", s.overall_rps}};
}

LatencyStats StatsFromJson(const json& j) {
  LatencyStats s;
  s.count = Field<uint64_t>(j, "count");
  s.error_count = Field<uint64_t>(j, "error_count");
  s.min = Field<int64_t>(j, "min");
  s.p50 = Field<int64_t>(j, "p50");
  s.p95 = Field<int64_t>(j, "p95");
  s.p99 = Field<int64_t>(j, "p99");
  s.p999 = Field<int64_t>(j, "p99.9");
  s.p99975 = Field<int64_t>(j, "p99.975");
  s.max = Field<int64_t>(j, "max");
  s.overall_rps = Field<double>(j, "overall_rps");
  return s;
}

// JSON has no infinity; an unbounded ratio is written as null.
json RatioJson(double r) { return std::isfinite(r) ? json(r) : json(nullptr); }

}  // namespace

json RunMetaToJson(const RunMeta& m) {
  return {{"benchmark", m.benchmark},
          {"backend", m.backend},
          {"warmup_ns", m.warmup_ns},
          {"measure_ns", m.measure_ns},
          {"workers", m.workers},
          {"seed", m.seed},
          {"noise_model", m.noise_model},
          {"wallclock_origin_ns", m.wallclock_origin_ns},
          {"degraded", m.degraded},
          {"notes", m.notes}};
}

RunMeta RunMetaFromJson(const json& j) {
  if (!j.is_object()) throw ParseError("run metadata must be an object");
  RunMeta m;
  m.benchmark = Field<std::string>(j, "benchmark");
  m.backend = Field<std::string>(j, "backend");
  m.warmup_ns = Field<int64_t>(j, "warmup_ns");
  m.measure_ns = Field<int64_t>(j, "measure_ns");
  m.workers = Field<uint32_t>(j, "workers");
  m.seed = Field<uint64_t>(j, "seed");
  m.noise_model = Field<std::string>(j, "noise_model");
  m.wallclock_origin_ns = Field<int64_t>(j, "wallclock_origin_ns");
  if (j.contains("degraded")) m.degraded = Field<bool>(j, "degraded");
  if (j.contains("notes")) m.notes = Field<std::vector<std::string>>(j, "notes");
  try {
    m.Validate();
  } catch (const ValidationError& e) {
    throw ParseError(e.what());
  }
  return m;
}

json SummaryToJson(const PercentileSummary& s) {
  json j = StatsToJson(s.overall);
  j["benchmark"] = s.benchmark;
  j["backend"] = s.backend;
  j["measure_ns"] = s.measure_ns;
  j["include_errors"] = s.include_errors;
  json by = json::object();
  for (const auto& [label, stats] : s.by_txn) by[label] = StatsToJson(stats);
  j["by_txn"] = by;
  return j;
}

PercentileSummary SummaryFromJson(const json& j) {
  if (!j.is_object()) throw ParseError("summary must be an object");
  PercentileSummary s;
  s.overall = StatsFromJson(j);
  s.benchmark = Field<std::string>(j, "benchmark");
  s.backend = Field<std::string>(j, "backend");
  s.measure_ns = Field<int64_t>(j, "measure_ns");
  s.include_errors = Field<bool>(j, "include_errors");
  if (auto it = j.find("by_txn"); it != j.end()) {
    if (!it->is_object()) throw ParseError("field 'by_txn' must be an object");
    for (const auto& [label, stats] : it->items()) s.by_txn[label] = StatsFromJson(stats);
  }
  return s;
}

json AttributionToJson(const AttributionReport& r) {
  std::vector<std::size_t> overlapped;
  for (std::size_t i = 0; i < r.flags.size(); ++i) {
    if (r.flags[i].overlapped) overlapped.push_back(i);
  }
  return {{"tail_pct", r.tail_pct},
          {"tail_threshold_ns", r.tail_threshold_ns},
          {"sample_count", r.flags.size()},
          {"overlapped_count", overlapped.size()},
          {"tail_samples", r.tail_samples},
          {"tail_overlapped", r.tail_overlapped},
          {"attribution_fraction", r.attribution_fraction},
          {"no_noise", r.no_noise},
          {"max_latency_ns", r.max_latency_ns},
          {"max_overlapped", r.max_overlapped},
          {"max_event_kind", r.max_event_kind},
          {"events_in_span", r.events_in_span},
          {"events_in_span_overlapped", r.events_in_span_overlapped},
          {"tail_by_kind", r.tail_by_kind},
          {"overlapped_sample_indices", overlapped}};
}

json DistortionToJson(const DistortionReport& r) {
  return {{"p50_ratio", RatioJson(r.p50_ratio)},
          {"p95_ratio", RatioJson(r.p95_ratio)},
          {"p99_ratio", RatioJson(r.p99_ratio)},
          {"max_ratio", RatioJson(r.max_ratio)},
          {"throughput_ratio", RatioJson(r.throughput_ratio)},
          {"tail_only", r.tail_only},
          {"warnings", r.warnings}};
}

std::string EncodePlotPoints(const PlotSeries& series) {
  std::string out = "t_ns,latency_ns,class\n";
  for (const auto& p : series.points) {
    out += std::to_string(p.t_ns) + "," + std::to_string(p.latency_ns) + "," +
           (p.cls == PlotPoint::Class::kExtreme ? "extreme" : "standard") + "\n";
  }
  return out;
}

std::string EncodeSlidingMean(const PlotSeries& series) {
  std::string out = "t_ns,mean_ns\n";
  char buf[64];
  for (const auto& m : series.sliding_mean) {
    std::snprintf(buf, sizeof(buf), "%lld,%.3f\n", static_cast<long long>(m.t_ns), m.mean_ns);
    out += buf;
  }
  return out;
}

std::string EncodeThroughput(const std::vector<uint64_t>& series) {
  std::string out = "second,requests\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out += std::to_string(i) + "," + std::to_string(series[i]) + "\n";
  }
  return out;
}

}  // namespace tailnoise
