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

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tailnoise {

// Transaction label. The labels used by the bundled workloads are
// predefined; any other label is interned on first use so that foreign
// traces round-trip verbatim.
class TxnType {
 public:
  enum Known : uint16_t {
    kNoOp = 0,
    kRead,
    kInsert,
    kScan,
    kUpdate,
    kDelete,
    kReadModifyWrite,
    kNewOrder,
    kPayment,
    kOrderStatus,
    kDelivery,
    kStockLevel,
    kKnownCount,
  };

  constexpr TxnType() = default;
  constexpr TxnType(Known k) : id_(k) {}  // NOLINT(google-explicit-constructor)

  // Returns the type for `label`, interning it if it is not predefined.
  // Throws ValidationError for empty labels or labels containing ',' or
  // line breaks (they would corrupt the CSV encoding).
  static TxnType FromLabel(std::string_view label);

  std::string_view label() const;
  uint16_t id() const { return id_; }
  bool is_known() const { return id_ < kKnownCount; }

  friend bool operator==(TxnType a, TxnType b) { return a.id_ == b.id_; }
  // Predefined labels order by declaration, interned ones after them by label.
  friend std::strong_ordering operator<=>(TxnType a, TxnType b);

 private:
  explicit constexpr TxnType(uint16_t id, int) : id_(id) {}
  uint16_t id_ = kNoOp;
};

enum class SampleStatus : uint8_t { kOk, kError };

std::string_view StatusLabel(SampleStatus s);

// One request as seen by the harness. Times are nanoseconds relative to the
// run origin.
struct LatencySample {
  uint32_t worker_id = 0;
  TxnType txn;
  int64_t start_ns = 0;
  int64_t latency_ns = 0;
  SampleStatus status = SampleStatus::kOk;

  int64_t end_ns() const { return start_ns + latency_ns; }
  bool ok() const { return status == SampleStatus::kOk; }

  friend bool operator==(const LatencySample&, const LatencySample&) = default;
};

// Trace ordering: start time, then worker, then transaction label order.
bool SampleBefore(const LatencySample& a, const LatencySample& b);

struct RunMeta {
  std::string benchmark;
  std::string backend;
  int64_t warmup_ns = 10'000'000'000;
  int64_t measure_ns = 60'000'000'000;
  uint32_t workers = 10;
  uint64_t seed = 0;
  std::string noise_model = "off";
  // Wall-clock time (ns since epoch) corresponding to trace time 0.
  int64_t wallclock_origin_ns = 0;
  // Run outcome, filled in by the driver.
  bool degraded = false;
  std::vector<std::string> notes;

  double warmup_s() const { return warmup_ns / 1e9; }
  double measure_s() const { return measure_ns / 1e9; }

  // Throws ValidationError unless warmup >= 0, measure > 0, workers >= 1.
  void Validate() const;

  friend bool operator==(const RunMeta&, const RunMeta&) = default;
};

// Immutable, sorted sequence of samples plus the run they came from.
class LatencyTrace {
 public:
  LatencyTrace() = default;
  // Sorts `samples` into trace order. Throws ValidationError on a negative
  // start or latency.
  LatencyTrace(RunMeta meta, std::vector<LatencySample> samples);

  const RunMeta& meta() const { return meta_; }
  // Moves the samples into a trace carrying `meta` instead.
  LatencyTrace WithMeta(RunMeta meta) && {
    LatencyTrace t;
    t.meta_ = std::move(meta);
    t.samples_ = std::move(samples_);
    return t;
  }
  std::span<const LatencySample> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }

  // Index of the first sample that starts before its worker's previous
  // request ended, or nullopt if the closed-loop ordering holds. O(n).
  std::optional<std::size_t> FindClosedLoopViolation() const;

  friend bool operator==(const LatencyTrace&, const LatencyTrace&) = default;

 private:
  RunMeta meta_;
  std::vector<LatencySample> samples_;
};

inline constexpr std::string_view kTraceCsvHeader = "worker_id,txn_type,start_ns,latency_ns,status";

void EncodeTrace(const LatencyTrace& trace, std::ostream& out);
std::string EncodeTrace(const LatencyTrace& trace);

// Parses trace CSV. Rows may appear in any order. The CSV carries no run
// metadata; `meta` is attached to the result as-is.
LatencyTrace DecodeTrace(std::string_view text, RunMeta meta = {});

// Concatenates traces that share identical RunMeta into one sorted trace.
LatencyTrace MergeTraces(std::span<const LatencyTrace> traces);

}  // namespace tailnoise
