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

#include "tailnoise/noise.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "tailnoise/clock.h"
#include "tailnoise/duration.h"
#include "tailnoise/errors.h"
#include "tailnoise/workload.h"

namespace tailnoise {

std::string_view SourceLabel(NoiseEvent::Source s) {
  return s == NoiseEvent::Source::kInjected ? "injected" : "jvm_log";
}

std::string_view InjectPointLabel(InjectPoint p) {
  switch (p) {
    case InjectPoint::kBeforeSend:
      return "before_send";
    case InjectPoint::kBeforeRecord:
      return "before_record";
    case InjectPoint::kBoth:
      return "both";
  }
  return "?";
}

InjectPoint ParseInjectPoint(std::string_view text) {
  if (text == "before_send") return InjectPoint::kBeforeSend;
  if (text == "before_record") return InjectPoint::kBeforeRecord;
  if (text == "both") return InjectPoint::kBoth;
  throw ParseError("inject point must be before_send, before_record or both, got '" +
                   std::string(text) + "'");
}

PauseModel PauseModel::Periodic(int64_t period_ns, int64_t duration_ns) {
  PauseModel m;
  m.kind = Kind::kPeriodic;
  m.period_ns = period_ns;
  m.duration_ns = duration_ns;
  return m;
}

PauseModel PauseModel::Poisson(double rate_per_s, int64_t duration_ns) {
  PauseModel m;
  m.kind = Kind::kPoisson;
  m.rate_per_s = rate_per_s;
  m.duration_ns = duration_ns;
  return m;
}

PauseModel PauseModel::Generational() {
  PauseModel m;
  m.kind = Kind::kGenerational;
  return m;
}

void PauseModel::Validate() const {
  auto rate_ok = [](double r) { return std::isfinite(r) && r >= 0; };
  switch (kind) {
    case Kind::kOff:
      return;
    case Kind::kPeriodic:
      if (period_ns <= 0) throw ValidationError("pause model: period must be > 0");
      if (duration_ns <= 0) throw ValidationError("pause model: duration must be > 0");
      return;
    case Kind::kPoisson:
      if (!rate_ok(rate_per_s)) throw ValidationError("pause model: rate must be >= 0");
      if (lognormal) {
        if (!std::isfinite(mu) || !std::isfinite(sigma) || sigma < 0) {
          throw ValidationError("pause model: lognormal needs finite mu and sigma >= 0");
        }
      } else if (duration_ns <= 0) {
        throw ValidationError("pause model: duration must be > 0");
      }
      return;
    case Kind::kGenerational:
      if (!rate_ok(minor_rate_per_s) || !rate_ok(major_rate_per_s)) {
        throw ValidationError("pause model: rates must be >= 0");
      }
      if (minor_duration_ns <= 0 || major_duration_ns <= 0) {
        throw ValidationError("pause model: durations must be > 0");
      }
      return;
  }
}

namespace {

std::string FormatRate(double r) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", r);
  return buf;
}

double ParseRate(std::string_view text) {
  auto parse_double = [&](std::string_view s) {
    std::string str(s);
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(str, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != str.size()) {
      throw ParseError("malformed rate '" + std::string(text) + "'");
    }
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_double(text);
  const double den = parse_double(text.substr(slash + 1));
  if (den == 0) throw ParseError("rate '" + std::string(text) + "' divides by zero");
  return parse_double(text.substr(0, slash)) / den;
}

std::vector<std::string_view> SplitColon(std::string_view text) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto c = text.find(':');
    parts.push_back(text.substr(0, c));
    if (c == std::string_view::npos) break;
    text.remove_prefix(c + 1);
  }
  return parts;
}

}  // namespace

std::string PauseModel::Describe() const {
  switch (kind) {
    case Kind::kOff:
      return "off";
    case Kind::kPeriodic:
      return "periodic:" + FormatDuration(period_ns) + ":" + FormatDuration(duration_ns);
    case Kind::kPoisson:
      if (lognormal) {
        return "poisson:" + FormatRate(rate_per_s) + ":lognormal:" + FormatRate(mu) + ":" +
               FormatRate(sigma);
      }
      return "poisson:" + FormatRate(rate_per_s) + ":" + FormatDuration(duration_ns);
    case Kind::kGenerational:
      return "generational:" + FormatRate(minor_rate_per_s) + ":" +
             FormatDuration(minor_duration_ns) + ":" + FormatRate(major_rate_per_s) + ":" +
             FormatDuration(major_duration_ns);
  }
  return "?";
}

PauseModel ParsePauseModel(std::string_view text) {
  const auto parts = SplitColon(text);
  const std::string_view kind = parts[0];
  auto bad = [&]() -> ParseError {
    return ParseError("malformed noise model '" + std::string(text) + "'");
  };
  PauseModel m;
  if (kind == "off") {
    if (parts.size() != 1) throw bad();
    return m;
  }
  if (kind == "periodic") {
    if (parts.size() != 3) throw bad();
    m = PauseModel::Periodic(ParseDuration(parts[1]), ParseDuration(parts[2]));
  } else if (kind == "poisson") {
    if (parts.size() == 3) {
      m = PauseModel::Poisson(ParseRate(parts[1]), ParseDuration(parts[2]));
    } else if (parts.size() == 5 && parts[2] == "lognormal") {
      m = PauseModel::Poisson(ParseRate(parts[1]), 1);
      m.lognormal = true;
      m.mu = ParseRate(parts[3]);
      m.sigma = ParseRate(parts[4]);
    } else {
      throw bad();
    }
  } else if (kind == "generational") {
    m = PauseModel::Generational();
    if (parts.size() == 5) {
      m.minor_rate_per_s = ParseRate(parts[1]);
      m.minor_duration_ns = ParseDuration(parts[2]);
      m.major_rate_per_s = ParseRate(parts[3]);
      m.major_duration_ns = ParseDuration(parts[4]);
    } else if (parts.size() != 1) {
      throw bad();
    }
  } else {
    throw bad();
  }
  try {
    m.Validate();
  } catch (const ValidationError& e) {
    throw ParseError(e.what());
  }
  return m;
}

namespace {

// Poisson arrivals over [0, horizon) with exponential gaps.
void DrawPoisson(Rng& rng, double rate_per_s, int64_t horizon_ns, std::string_view kind,
                 const auto& draw_duration, std::vector<NoiseEvent>& out) {
  if (rate_per_s <= 0) return;
  long double t = 0;
  while (true) {
    const double u = UniformUnit(rng);
    t += -std::log1p(-u) / rate_per_s * 1e9L;
    if (t >= static_cast<long double>(horizon_ns)) return;
    NoiseEvent e;
    e.start_ns = static_cast<int64_t>(std::llround(t));
    e.duration_ns = draw_duration();
    e.kind = std::string(kind);
    out.push_back(std::move(e));
  }
}

std::vector<NoiseEvent> MergeOverlapping(std::vector<NoiseEvent> raw) {
  std::stable_sort(raw.begin(), raw.end(),
                   [](const NoiseEvent& a, const NoiseEvent& b) { return a.start_ns < b.start_ns; });
  std::vector<NoiseEvent> merged;
  int64_t longest = 0;
  for (auto& e : raw) {
    if (!merged.empty() && e.start_ns < merged.back().end_ns()) {
      auto& last = merged.back();
      last.duration_ns = std::max(last.end_ns(), e.end_ns()) - last.start_ns;
      // The merged pause keeps the label of its longest constituent.
      if (e.duration_ns > longest) {
        longest = e.duration_ns;
        last.kind = e.kind;
      }
      continue;
    }
    longest = e.duration_ns;
    merged.push_back(std::move(e));
  }
  return merged;
}

}  // namespace

std::vector<NoiseEvent> GenerateNoiseSchedule(const PauseModel& model, int64_t horizon_ns,
                                              uint64_t seed) {
  model.Validate();
  if (model.kind == PauseModel::Kind::kOff) return {};
  if (horizon_ns <= 0) throw ValidationError("noise horizon must be > 0");

  std::vector<NoiseEvent> raw;
  switch (model.kind) {
    case PauseModel::Kind::kOff:
      break;
    case PauseModel::Kind::kPeriodic:
      for (int64_t t = model.period_ns; t < horizon_ns; t += model.period_ns) {
        raw.push_back(NoiseEvent{t, model.duration_ns, NoiseEvent::Source::kInjected, "periodic"});
      }
      break;
    case PauseModel::Kind::kPoisson: {
      Rng rng(DeriveSeed(seed, 0));
      std::normal_distribution<double> normal;
      auto duration = [&]() -> int64_t {
        if (!model.lognormal) return model.duration_ns;
        const double ns = std::exp(model.mu + model.sigma * normal(rng));
        return ns >= 1 ? static_cast<int64_t>(std::llround(std::min(ns, 9.0e18))) : 1;
      };
      DrawPoisson(rng, model.rate_per_s, horizon_ns, "poisson", duration, raw);
      break;
    }
    case PauseModel::Kind::kGenerational: {
      Rng minor_rng(DeriveSeed(seed, 1));
      Rng major_rng(DeriveSeed(seed, 2));
      DrawPoisson(minor_rng, model.minor_rate_per_s, horizon_ns, "minor",
                  [&] { return model.minor_duration_ns; }, raw);
      DrawPoisson(major_rng, model.major_rate_per_s, horizon_ns, "major",
                  [&] { return model.major_duration_ns; }, raw);
      break;
    }
  }
  return MergeOverlapping(std::move(raw));
}

NoiseGate::NoiseGate(std::vector<NoiseEvent> events) : events_(std::move(events)) {
  for (std::size_t i = 0; i < events_.size(); ++i) {
    if (events_[i].duration_ns <= 0) throw ValidationError("noise event duration must be > 0");
    if (i > 0 && events_[i].start_ns < events_[i - 1].end_ns()) {
      throw ValidationError("noise gate events must be sorted and disjoint");
    }
  }
}

std::ptrdiff_t NoiseGate::Find(int64_t t) const {
  // First event that ends after t; it contains t iff it also starts at or before t.
  const auto it = std::upper_bound(events_.begin(), events_.end(), t,
                                   [](int64_t v, const NoiseEvent& e) { return v < e.end_ns(); });
  if (it == events_.end() || it->start_ns > t) return -1;
  return it - events_.begin();
}

int64_t NoiseGate::Wait(int64_t now_ns, int64_t origin_ns) const {
  const auto idx = Find(now_ns);
  if (idx < 0) return now_ns;
  const int64_t resume = events_[static_cast<std::size_t>(idx)].end_ns();
  WaitUntil(origin_ns + resume, 0);
  return resume;
}

}  // namespace tailnoise
