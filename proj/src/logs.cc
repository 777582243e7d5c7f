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

#include "tailnoise/logs.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>

#include "tailnoise/duration.h"
#include "tailnoise/errors.h"

namespace tailnoise {

namespace {

std::string QuoteCsvField(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Splits one CSV record. Only the quoting needed for free-form labels is
// supported: a field may be wrapped in double quotes with "" as escape.
std::vector<std::string> SplitCsv(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c == '"' && fields.back().empty()) {
      quoted = true;
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", line_no);
  return fields;
}

template <typename Int>
bool ParseIntExact(std::string_view s, Int& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

void SortByStart(std::vector<NoiseEvent>& events) {
  std::stable_sort(events.begin(), events.end(), [](const NoiseEvent& a, const NoiseEvent& b) {
    return a.start_ns < b.start_ns;
  });
}

}  // namespace

std::string EncodeNoiseLog(const std::vector<NoiseEvent>& events) {
  std::string out(kNoiseCsvHeader);
  out += '\n';
  for (const auto& e : events) {
    out += std::to_string(e.start_ns);
    out += ',';
    out += std::to_string(e.duration_ns);
    out += ',';
    out += SourceLabel(e.source);
    out += ',';
    out += QuoteCsvField(e.kind);
    out += '\n';
  }
  return out;
}

std::vector<NoiseEvent> ParseNoiseLog(std::string_view text) {
  std::vector<NoiseEvent> events;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!saw_header) {
      if (line != kNoiseCsvHeader) {
        throw ParseError("expected header '" + std::string(kNoiseCsvHeader) + "'", line_no);
      }
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    const auto fields = SplitCsv(line, line_no);
    if (fields.size() != 4) {
      throw ParseError("expected 4 fields, got " + std::to_string(fields.size()), line_no);
    }
    NoiseEvent e;
    if (!ParseIntExact(fields[0], e.start_ns)) {
      throw ParseError("bad start_ns '" + fields[0] + "'", line_no);
    }
    if (!ParseIntExact(fields[1], e.duration_ns)) {
      throw ParseError("bad duration_ns '" + fields[1] + "'", line_no);
    }
    if (e.duration_ns <= 0) {
      throw ValidationError("line " + std::to_string(line_no) + ": duration_ns must be > 0");
    }
    if (fields[2] == "injected") {
      e.source = NoiseEvent::Source::kInjected;
    } else if (fields[2] == "jvm_log") {
      e.source = NoiseEvent::Source::kJvmLog;
    } else {
      throw ParseError("bad source '" + fields[2] + "'", line_no);
    }
    e.kind = fields[3];
    events.push_back(std::move(e));
  }
  if (!saw_header) throw ParseError("missing noise log header", 1);
  SortByStart(events);
  return events;
}

int64_t ParseIsoTimestamp(std::string_view text) {
  const std::string original(text);
  auto fail = [&]() -> ParseError { return ParseError("malformed timestamp '" + original + "'"); };
  auto take_int = [&](std::size_t digits) {
    if (text.size() < digits) throw fail();
    int v = 0;
    for (std::size_t i = 0; i < digits; ++i) {
      if (!std::isdigit(static_cast<unsigned char>(text[i]))) throw fail();
      v = v * 10 + (text[i] - '0');
    }
    text.remove_prefix(digits);
    return v;
  };
  auto expect = [&](char c) {
    if (text.empty() || text.front() != c) throw fail();
    text.remove_prefix(1);
  };
  const int year = take_int(4);
  expect('-');
  const int month = take_int(2);
  expect('-');
  const int day = take_int(2);
  if (text.empty() || (text.front() != 'T' && text.front() != ' ')) throw fail();
  text.remove_prefix(1);
  const int hour = take_int(2);
  expect(':');
  const int minute = take_int(2);
  expect(':');
  const int second = take_int(2);
  int64_t frac_ns = 0;
  if (!text.empty() && (text.front() == '.' || text.front() == ',')) {
    text.remove_prefix(1);
    int64_t scale = 100'000'000;
    bool any = false;
    while (!text.empty() && std::isdigit(static_cast<unsigned char>(text.front()))) {
      frac_ns += (text.front() - '0') * scale;
      scale /= 10;
      any = true;
      text.remove_prefix(1);
    }
    if (!any) throw fail();
  }
  int64_t offset_s = 0;
  if (!text.empty()) {
    if (text == "Z") {
      text.remove_prefix(1);
    } else if (text.front() == '+' || text.front() == '-') {
      const int sign = text.front() == '-' ? -1 : 1;
      text.remove_prefix(1);
      const int oh = take_int(2);
      if (!text.empty() && text.front() == ':') text.remove_prefix(1);
      const int om = take_int(2);
      offset_s = sign * (oh * 3600 + om * 60);
    }
  }
  if (!text.empty()) throw fail();

  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year(year), std::chrono::month(static_cast<unsigned>(month)),
                           std::chrono::day(static_cast<unsigned>(day))};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) throw fail();
  const int64_t days = sys_days(ymd).time_since_epoch().count();
  const int64_t secs = days * 86400 + hour * 3600 + minute * 60 + second - offset_s;
  return secs * kNanosPerSecond + frac_ns;
}

LogOrigin ParseLogOrigin(std::string_view text) {
  LogOrigin origin;
  if (text.starts_with("uptime:")) {
    origin.clock = LogOrigin::Clock::kUptime;
    origin.origin_ns = ParseDuration(text.substr(7));
    return origin;
  }
  origin.clock = LogOrigin::Clock::kWallClock;
  int64_t ns = 0;
  if (ParseIntExact(text, ns)) {
    origin.origin_ns = ns;
  } else {
    origin.origin_ns = ParseIsoTimestamp(text);
  }
  return origin;
}

namespace {

// Uptime decorations: "12.345s", "12345ms", "12345678ns".
std::optional<int64_t> ParseUptime(std::string_view d) {
  std::string_view digits;
  if (d.ends_with("ns") || d.ends_with("ms")) {
    digits = d.substr(0, d.size() - 2);
  } else if (d.ends_with("s")) {
    digits = d.substr(0, d.size() - 1);
  } else {
    return std::nullopt;
  }
  if (digits.empty() || !std::isdigit(static_cast<unsigned char>(digits.front()))) {
    return std::nullopt;
  }
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c)) && c != '.') return std::nullopt;
  }
  try {
    return ParseDuration(d);
  } catch (const ParseError&) {
    return std::nullopt;
  }
}

bool LooksLikeIsoTimestamp(std::string_view d) {
  return d.size() >= 19 && std::isdigit(static_cast<unsigned char>(d[0])) && d[4] == '-' &&
         d[7] == '-';
}

// Integer nanoseconds following `label` and terminated by " ns".
std::optional<int64_t> FieldNanos(std::string_view message, std::string_view label) {
  const auto pos = message.find(label);
  if (pos == std::string_view::npos) return std::nullopt;
  std::string_view rest = message.substr(pos + label.size());
  const auto end = rest.find(" ns");
  if (end == std::string_view::npos) return std::nullopt;
  int64_t v = 0;
  if (!ParseIntExact(rest.substr(0, end), v) || v < 0) return std::nullopt;
  return v;
}

struct SafepointRecord {
  std::string name;
  int64_t stamp_ns = 0;
  int64_t duration_ns = 0;
};

std::optional<SafepointRecord> ParseSafepointLine(std::string_view line, LogOrigin::Clock clock) {
  std::optional<int64_t> wall, uptime;
  while (!line.empty() && line.front() == '[') {
    const auto close = line.find(']');
    if (close == std::string_view::npos) return std::nullopt;
    std::string_view deco = line.substr(1, close - 1);
    while (!deco.empty() && deco.front() == ' ') deco.remove_prefix(1);
    while (!deco.empty() && deco.back() == ' ') deco.remove_suffix(1);
    if (LooksLikeIsoTimestamp(deco)) {
      try {
        wall = ParseIsoTimestamp(deco);
      } catch (const ParseError&) {
        return std::nullopt;
      }
    } else if (auto up = ParseUptime(deco)) {
      // With several uptime decorations, the finest resolution wins.
      if (!uptime || deco.ends_with("ns")) uptime = up;
    }
    line.remove_prefix(close + 1);
  }
  while (!line.empty() && line.front() == ' ') line.remove_prefix(1);

  constexpr std::string_view kPrefix = "Safepoint \"";
  if (!line.starts_with(kPrefix)) return std::nullopt;
  line.remove_prefix(kPrefix.size());
  const auto quote = line.find('"');
  if (quote == std::string_view::npos || quote == 0) return std::nullopt;

  SafepointRecord rec;
  rec.name = std::string(line.substr(0, quote));
  const std::string_view fields = line.substr(quote + 1);
  const auto reach = FieldNanos(fields, "Reaching safepoint: ");
  const auto at = FieldNanos(fields, "At safepoint: ");
  if (!reach || !at) return std::nullopt;
  rec.duration_ns = *reach + *at;
  const auto& stamp = clock == LogOrigin::Clock::kWallClock ? wall : uptime;
  if (!stamp) return std::nullopt;
  rec.stamp_ns = *stamp;
  return rec;
}

}  // namespace

SafepointParseResult ParseHotspotSafepointLog(std::string_view text, const LogOrigin& origin) {
  SafepointParseResult result;
  bool any_text = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    any_text = true;
    auto rec = ParseSafepointLine(line, origin.clock);
    if (!rec) {
      ++result.skipped_lines;
      continue;
    }
    // A zero-length safepoint still occupied the VM thread; keep it visible.
    const int64_t duration = std::max<int64_t>(rec->duration_ns, 1);
    NoiseEvent e;
    e.start_ns = rec->stamp_ns - origin.origin_ns - duration;
    e.duration_ns = duration;
    e.source = NoiseEvent::Source::kJvmLog;
    e.kind = std::move(rec->name);
    result.events.push_back(std::move(e));
  }
  if (any_text && result.events.empty()) {
    throw ParseError(std::string("no safepoint records found; the log needs -Xlog:safepoint with ") +
                     (origin.clock == LogOrigin::Clock::kWallClock ? "time/utctime" : "uptime") +
                     " decorations");
  }
  SortByStart(result.events);
  return result;
}

}  // namespace tailnoise
