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

#include "tailnoise/model.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <deque>
#include <mutex>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "tailnoise/errors.h"

namespace tailnoise {

namespace {

constexpr std::array<std::string_view, TxnType::kKnownCount> kKnownLabels = {
    "NoOp",   "Read",     "Insert",      "Scan",     "Update",     "Delete",
    "ReadModifyWrite", "NewOrder", "Payment", "OrderStatus", "Delivery", "StockLevel",
};

// Interned labels beyond the predefined set. Entries are never removed, so
// string_views into the deque stay valid for the life of the process.
struct LabelRegistry {
  std::mutex mu;
  std::deque<std::string> labels;
  std::unordered_map<std::string, uint16_t> ids;
};

LabelRegistry& Registry() {
  static LabelRegistry* registry = new LabelRegistry;
  return *registry;
}

}  // namespace

TxnType TxnType::FromLabel(std::string_view label) {
  for (uint16_t i = 0; i < kKnownCount; ++i) {
    if (kKnownLabels[i] == label) return TxnType(i, 0);
  }
  if (label.empty() || label.find_first_of(",\r\n\"") != std::string_view::npos) {
    throw ValidationError("invalid transaction label '" + std::string(label) + "'");
  }
  auto& reg = Registry();
  std::lock_guard lock(reg.mu);
  auto it = reg.ids.find(std::string(label));
  if (it != reg.ids.end()) return TxnType(it->second, 0);
  if (reg.labels.size() + kKnownCount >= 0xffff) {
    throw ValidationError("too many distinct transaction labels");
  }
  const auto id = static_cast<uint16_t>(kKnownCount + reg.labels.size());
  reg.labels.emplace_back(label);
  reg.ids.emplace(std::string(label), id);
  return TxnType(id, 0);
}

std::string_view TxnType::label() const {
  if (is_known()) return kKnownLabels[id_];
  auto& reg = Registry();
  std::lock_guard lock(reg.mu);
  return reg.labels[id_ - kKnownCount];
}

std::strong_ordering operator<=>(TxnType a, TxnType b) {
  if (a.id_ == b.id_) return std::strong_ordering::equal;
  if (a.is_known() || b.is_known()) return a.id_ <=> b.id_;
  return a.label().compare(b.label()) <=> 0;
}

std::string_view StatusLabel(SampleStatus s) {
  return s == SampleStatus::kOk ? "ok" : "error";
}

bool SampleBefore(const LatencySample& a, const LatencySample& b) {
  if (a.start_ns != b.start_ns) return a.start_ns < b.start_ns;
  if (a.worker_id != b.worker_id) return a.worker_id < b.worker_id;
  return a.txn < b.txn;
}

void RunMeta::Validate() const {
  if (warmup_ns < 0) throw ValidationError("warmup must be >= 0");
  if (measure_ns <= 0) throw ValidationError("measure must be > 0");
  if (workers < 1) throw ValidationError("workers must be >= 1");
}

LatencyTrace::LatencyTrace(RunMeta meta, std::vector<LatencySample> samples)
    : meta_(std::move(meta)), samples_(std::move(samples)) {
  for (const auto& s : samples_) {
    if (s.start_ns < 0) throw ValidationError("sample start_ns < 0");
    if (s.latency_ns < 0) throw ValidationError("sample latency_ns < 0");
  }
  if (!std::is_sorted(samples_.begin(), samples_.end(), SampleBefore)) {
    std::stable_sort(samples_.begin(), samples_.end(), SampleBefore);
  }
}

std::optional<std::size_t> LatencyTrace::FindClosedLoopViolation() const {
  std::unordered_map<uint32_t, int64_t> busy_until;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    auto [it, inserted] = busy_until.try_emplace(s.worker_id, s.end_ns());
    if (!inserted) {
      if (s.start_ns < it->second) return i;
      it->second = s.end_ns();
    }
  }
  return std::nullopt;
}

void EncodeTrace(const LatencyTrace& trace, std::ostream& out) {
  out << kTraceCsvHeader << '\n';
  std::string line;
  char buf[24];
  for (const auto& s : trace.samples()) {
    line.clear();
    auto append_int = [&](auto v) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      line.append(buf, end);
    };
    append_int(s.worker_id);
    line += ',';
    line += s.txn.label();
    line += ',';
    append_int(s.start_ns);
    line += ',';
    append_int(s.latency_ns);
    line += ',';
    line += StatusLabel(s.status);
    line += '\n';
    out << line;
  }
  if (!out) throw IoError("failed to write trace CSV");
}

std::string EncodeTrace(const LatencyTrace& trace) {
  std::ostringstream out;
  EncodeTrace(trace, out);
  return std::move(out).str();
}

namespace {

template <typename Int>
Int ParseInt(std::string_view field, const char* name, std::size_t line) {
  Int value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError(std::string("bad ") + name + " '" + std::string(field) + "'", line);
  }
  return value;
}

}  // namespace

LatencyTrace DecodeTrace(std::string_view text, RunMeta meta) {
  std::vector<LatencySample> samples;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!saw_header) {
      if (line != kTraceCsvHeader) {
        throw ParseError("expected header '" + std::string(kTraceCsvHeader) + "'", line_no);
      }
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;

    std::array<std::string_view, 5> fields;
    std::size_t n = 0;
    while (true) {
      const auto comma = line.find(',');
      if (n == fields.size()) throw ParseError("too many fields", line_no);
      fields[n++] = line.substr(0, comma);
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (n != fields.size()) throw ParseError("expected 5 fields, got " + std::to_string(n), line_no);

    LatencySample s;
    s.worker_id = ParseInt<uint32_t>(fields[0], "worker_id", line_no);
    try {
      s.txn = TxnType::FromLabel(fields[1]);
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line_no);
    }
    s.start_ns = ParseInt<int64_t>(fields[2], "start_ns", line_no);
    s.latency_ns = ParseInt<int64_t>(fields[3], "latency_ns", line_no);
    if (fields[4] == "ok") {
      s.status = SampleStatus::kOk;
    } else if (fields[4] == "error") {
      s.status = SampleStatus::kError;
    } else {
      throw ParseError("bad status '" + std::string(fields[4]) + "'", line_no);
    }
    if (s.start_ns < 0) {
      throw ValidationError("line " + std::to_string(line_no) + ": start_ns < 0");
    }
    if (s.latency_ns < 0) {
      throw ValidationError("line " + std::to_string(line_no) + ": latency_ns < 0");
    }
    samples.push_back(s);
  }
  if (!saw_header) throw ParseError("missing trace header", 1);
  return LatencyTrace(std::move(meta), std::move(samples));
}

LatencyTrace MergeTraces(std::span<const LatencyTrace> traces) {
  if (traces.empty()) return LatencyTrace();
  std::size_t total = 0;
  for (const auto& t : traces) {
    if (!(t.meta() == traces.front().meta())) {
      throw ValidationError("cannot merge traces with different run metadata");
    }
    total += t.size();
  }
  std::vector<LatencySample> all;
  all.reserve(total);
  for (const auto& t : traces) all.insert(all.end(), t.samples().begin(), t.samples().end());
  return LatencyTrace(traces.front().meta(), std::move(all));
}

}  // namespace tailnoise
