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

#include "tailnoise/cli.h"

#include <signal.h>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tailnoise/analysis.h"
#include "tailnoise/config.h"
#include "tailnoise/driver.h"
#include "tailnoise/duration.h"
#include "tailnoise/echo.h"
#include "tailnoise/errors.h"
#include "tailnoise/file_util.h"
#include "tailnoise/logs.h"
#include "tailnoise/report_json.h"

namespace tailnoise {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Errors in what the user asked for, as opposed to failures while doing it.
class UsageError : public Error {
 public:
  using Error::Error;
};

std::string Dump(const json& j) { return j.dump(2) + "\n"; }

void EnsureDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

int64_t DurationArg(const std::string& text, const char* flag) {
  try {
    return ParseDuration(text);
  } catch (const ParseError& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

json ReadJson(const fs::path& path) {
  try {
    return json::parse(ReadFile(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

// ---- run ------------------------------------------------------------------

struct RunArgs {
  std::string config;
  std::string out = "out";
};

void CmdRun(const RunArgs& args, std::ostream& out, std::ostream& err) {
  BenchmarkConfig config;
  try {
    config = LoadConfig(args.config);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  const fs::path dir(args.out);
  EnsureDir(dir);

  err << "running " << BenchmarkLabel(config.benchmark) << " on " << BackendLabel(config.backend.kind)
      << " with " << config.workers << " workers (warm-up " << FormatDuration(config.warmup_ns)
      << ", measure " << FormatDuration(config.measure_ns) << ")\n";
  RunArtifacts run = RunBenchmark(config);

  WriteFile(dir / "trace.csv", EncodeTrace(run.trace));
  WriteFile(dir / "noise.csv", EncodeNoiseLog(run.injected_noise));
  WriteFile(dir / "throughput.csv", EncodeThroughput(run.throughput_series));
  json meta = {{"run_meta", RunMetaToJson(run.run_meta)},
               {"config", ConfigToJson(config)},
               {"throughput_series", run.throughput_series}};
  WriteFile(dir / "meta.json", Dump(meta));
  for (const auto& note : run.run_meta.notes) err << "note: " << note << "\n";
  if (run.run_meta.degraded) err << "warning: run is degraded\n";

  const PercentileSummary summary = SummarizeRun(run.trace);
  WriteFile(dir / "summary.json", Dump(SummaryToJson(summary)));
  out << "samples=" << summary.overall.count << " errors=" << summary.overall.error_count
      << " rps=" << static_cast<int64_t>(summary.overall.overall_rps)
      << " p50=" << summary.overall.p50 << "ns p99=" << summary.overall.p99
      << "ns max=" << summary.overall.max << "ns -> " << dir.string() << "\n";
}

// ---- analyze --------------------------------------------------------------

struct AnalyzeArgs {
  std::string trace;
  std::string meta;
  std::string out = ".";
  bool summary = false;
  bool plot = false;
  bool include_errors = false;
  std::optional<double> rate;
  std::optional<double> lower;
  std::optional<double> upper;
  uint64_t seed = 0;
  std::size_t window = 1000;
  std::string txn;
};

// Trace plus run metadata: from --meta, else meta.json beside the trace,
// else inferred from the samples (no warm-up, measure = sample span).
LatencyTrace LoadTrace(const fs::path& trace_path, const std::string& meta_path) {
  const std::string text = ReadFile(trace_path);
  fs::path meta_file = meta_path;
  if (meta_file.empty()) {
    const fs::path beside = trace_path.parent_path() / "meta.json";
    if (fs::exists(beside)) meta_file = beside;
  }
  if (!meta_file.empty()) {
    json j = ReadJson(meta_file);
    const json& m = j.contains("run_meta") ? j["run_meta"] : j;
    return DecodeTrace(text, RunMetaFromJson(m));
  }
  LatencyTrace trace = DecodeTrace(text);
  RunMeta meta;
  meta.benchmark = "unknown";
  meta.backend = "unknown";
  meta.warmup_ns = 0;
  meta.workers = 1;
  int64_t end = 1;
  for (const auto& s : trace.samples()) {
    end = std::max(end, s.end_ns());
    meta.workers = std::max(meta.workers, s.worker_id + 1);
  }
  meta.measure_ns = end;
  return std::move(trace).WithMeta(meta);
}

void CmdAnalyze(AnalyzeArgs args, std::ostream& out, std::ostream& err) {
  if (!args.summary && !args.plot) args.summary = true;
  std::optional<TxnType> txn;
  if (!args.txn.empty()) {
    try {
      txn = TxnType::FromLabel(args.txn);
    } catch (const ValidationError& e) {
      throw UsageError(std::string("--txn: ") + e.what());
    }
  }
  const LatencyTrace trace = LoadTrace(args.trace, args.meta);
  const fs::path dir(args.out);
  EnsureDir(dir);

  if (args.summary) {
    const PercentileSummary summary = SummarizeRun(trace, args.include_errors);
    const std::string text = Dump(SummaryToJson(summary));
    WriteFile(dir / "summary.json", text);
    out << text;
  }
  if (args.plot) {
    DownsampleParams params = DefaultDownsampleParams(trace.meta().benchmark, args.txn);
    if (args.rate) params.rate = *args.rate;
    if (args.lower) params.lower_pct = *args.lower;
    if (args.upper) params.upper_pct = *args.upper;
    params.seed = args.seed;
    params.window = args.window;
    try {
      params.Validate();
    } catch (const ValidationError& e) {
      throw UsageError(e.what());
    }
    const PlotSeries series = DownsampleForPlot(trace, params, txn);
    WriteFile(dir / "plot_points.csv", EncodePlotPoints(series));
    WriteFile(dir / "plot_mean.csv", EncodeSlidingMean(series));
    std::size_t extreme = 0;
    for (const auto& p : series.points) extreme += p.cls == PlotPoint::Class::kExtreme;
    err << "plot: " << series.points.size() << " of " << series.source_count << " samples kept ("
        << extreme << " extreme, bounds [" << series.lower_bound_ns << ", "
        << series.upper_bound_ns << "] ns)\n";
  }
}

// ---- attribute ------------------------------------------------------------

struct AttributeArgs {
  std::string trace;
  std::string meta;
  std::vector<std::string> noise;
  std::string jvm_log;
  std::string origin;
  double tail_pct = 99.9;
  std::string out = ".";
};

void CmdAttribute(const AttributeArgs& args, std::ostream& out, std::ostream& err) {
  if (args.noise.empty() && args.jvm_log.empty()) {
    throw UsageError("attribute needs --noise and/or --jvm-log");
  }
  if (!(args.tail_pct >= 0 && args.tail_pct <= 100)) throw UsageError("--tail-pct must be in [0, 100]");
  const LatencyTrace trace = LoadTrace(args.trace, args.meta);

  std::vector<NoiseEvent> events;
  for (const auto& f : args.noise) {
    auto parsed = ParseNoiseLog(ReadFile(f));
    events.insert(events.end(), parsed.begin(), parsed.end());
  }
  if (!args.jvm_log.empty()) {
    LogOrigin origin;
    if (args.origin.empty()) {
      origin.clock = LogOrigin::Clock::kWallClock;
      origin.origin_ns = trace.meta().wallclock_origin_ns;
      if (origin.origin_ns == 0) throw UsageError("--jvm-log needs --origin when the trace has no run metadata");
    } else {
      try {
        origin = ParseLogOrigin(args.origin);
      } catch (const ParseError& e) {
        throw UsageError(std::string("--origin: ") + e.what());
      }
    }
    auto parsed = ParseHotspotSafepointLog(ReadFile(args.jvm_log), origin);
    if (parsed.skipped_lines > 0) {
      err << "jvm log: skipped " << parsed.skipped_lines << " non-safepoint lines\n";
    }
    events.insert(events.end(), parsed.events.begin(), parsed.events.end());
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const NoiseEvent& a, const NoiseEvent& b) { return a.start_ns < b.start_ns; });

  const AttributionReport report = AttributeNoise(trace, events, args.tail_pct);
  const fs::path dir(args.out);
  EnsureDir(dir);
  json j = AttributionToJson(report);
  WriteFile(dir / "attribution.json", Dump(j));
  j.erase("overlapped_sample_indices");
  out << Dump(j);
}

// ---- compare --------------------------------------------------------------

struct CompareArgs {
  std::string baseline;
  std::string perturbed;
  std::string out = ".";
};

PercentileSummary LoadSummary(const fs::path& path) {
  try {
    return SummaryFromJson(ReadJson(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void CmdCompare(const CompareArgs& args, std::ostream& out, std::ostream& err) {
  const DistortionReport report = CompareRuns(LoadSummary(args.baseline), LoadSummary(args.perturbed));
  for (const auto& w : report.warnings) err << "warning: " << w << "\n";
  const fs::path dir(args.out);
  EnsureDir(dir);
  const std::string text = Dump(DistortionToJson(report));
  WriteFile(dir / "distortion.json", text);
  out << text;
}

// ---- gen-noise ------------------------------------------------------------

struct GenNoiseArgs {
  std::string model;
  std::string horizon;
  uint64_t seed = 0;
  std::string out;
};

void CmdGenNoise(const GenNoiseArgs& args, std::ostream& out) {
  PauseModel model;
  try {
    model = ParsePauseModel(args.model);
  } catch (const ParseError& e) {
    throw UsageError(std::string("--model: ") + e.what());
  }
  const int64_t horizon = DurationArg(args.horizon, "--horizon");
  if (horizon <= 0) throw UsageError("--horizon must be > 0");
  const std::string csv = EncodeNoiseLog(GenerateNoiseSchedule(model, horizon, args.seed));
  if (args.out.empty()) {
    out << csv;
  } else {
    WriteFile(args.out, csv);
  }
}

// ---- serve-echo -----------------------------------------------------------

struct ServeEchoArgs {
  std::string listen = "127.0.0.1:7000";
  std::string delay = "0ns";
  std::string run_for;
};

void CmdServeEcho(const ServeEchoArgs& args, std::ostream& err) {
  Endpoint ep;
  try {
    ep = ParseEndpoint(args.listen);
  } catch (const ParseError& e) {
    throw UsageError(std::string("--listen: ") + e.what());
  }
  const int64_t delay = DurationArg(args.delay, "--delay");
  if (delay < 0) throw UsageError("--delay must be >= 0");
  const bool bounded = !args.run_for.empty();
  const int64_t run_for = bounded ? DurationArg(args.run_for, "--for") : 0;

  // Block the stop signals before any server thread exists so that only
  // sigtimedwait below receives them.
  sigset_t stop;
  sigemptyset(&stop);
  sigaddset(&stop, SIGINT);
  sigaddset(&stop, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop, nullptr);

  EchoServer server(ep, delay);
  err << "echo server listening on " << ep.host << ":" << server.port() << " (reply delay "
      << FormatDuration(delay) << ")\n";
  const int64_t deadline = MonotonicNanos() + run_for;
  while (true) {
    timespec tick{0, 100'000'000};
    if (sigtimedwait(&stop, nullptr, &tick) > 0) break;
    if (bounded && MonotonicNanos() >= deadline) break;
  }
  server.Stop();
  pthread_sigmask(SIG_UNBLOCK, &stop, nullptr);
  err << "echo server stopped after " << server.messages_served() << " messages\n";
}

}  // namespace

int Dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Closed-loop benchmark harness with pause injection and tail-latency attribution",
               "tailnoise"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Execute a benchmark run");
  run->add_option("--config", run_args.config, "Run configuration (JSON) or a previous meta.json")
      ->required();
  run->add_option("--out", run_args.out, "Output directory")->capture_default_str();

  ServeEchoArgs echo_args;
  auto* echo = app.add_subcommand("serve-echo", "Run the loopback echo backend");
  echo->add_option("--listen", echo_args.listen, "host:port to bind")->capture_default_str();
  echo->add_option("--delay", echo_args.delay, "Reply delay, e.g. 5ms")->capture_default_str();
  echo->add_option("--for", echo_args.run_for, "Stop after this long instead of waiting for a signal");

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "Summaries and plot data for a trace");
  analyze->add_option("--trace", analyze_args.trace, "trace.csv")->required();
  analyze->add_option("--meta", analyze_args.meta, "meta.json (default: next to the trace)");
  analyze->add_flag("--summary", analyze_args.summary, "Write summary.json");
  analyze->add_flag("--plot", analyze_args.plot, "Write plot_points.csv and plot_mean.csv");
  analyze->add_flag("--include-errors", analyze_args.include_errors, "Count error samples in percentiles");
  analyze->add_option("--rate", analyze_args.rate, "Sampling rate for in-bounds points");
  analyze->add_option("--lower", analyze_args.lower, "Lower extreme-value percentile");
  analyze->add_option("--upper", analyze_args.upper, "Upper extreme-value percentile");
  analyze->add_option("--seed", analyze_args.seed, "Sampling seed");
  analyze->add_option("--window", analyze_args.window, "Sliding-mean window (points)")->capture_default_str();
  analyze->add_option("--txn", analyze_args.txn, "Restrict the plot to one transaction type");
  analyze->add_option("--out", analyze_args.out, "Output directory")->capture_default_str();

  AttributeArgs attr_args;
  auto* attribute = app.add_subcommand("attribute", "Attribute tail latencies to pause events");
  attribute->add_option("--trace", attr_args.trace, "trace.csv")->required();
  attribute->add_option("--meta", attr_args.meta, "meta.json (default: next to the trace)");
  attribute->add_option("--noise", attr_args.noise, "Noise CSV files")->expected(1, -1);
  attribute->add_option("--jvm-log", attr_args.jvm_log, "HotSpot unified log with safepoint records");
  attribute->add_option("--origin", attr_args.origin,
                        "Run origin on the log clock: ISO-8601 time, epoch ns, or uptime:<dur>");
  attribute->add_option("--tail-pct", attr_args.tail_pct, "Tail percentile")->capture_default_str();
  attribute->add_option("--out", attr_args.out, "Output directory")->capture_default_str();

  CompareArgs cmp_args;
  auto* compare = app.add_subcommand("compare", "Distortion of a perturbed run against a baseline");
  compare->add_option("--baseline", cmp_args.baseline, "Baseline summary.json")->required();
  compare->add_option("--perturbed", cmp_args.perturbed, "Perturbed summary.json")->required();
  compare->add_option("--out", cmp_args.out, "Output directory")->capture_default_str();

  GenNoiseArgs gen_args;
  auto* gen = app.add_subcommand("gen-noise", "Emit a pause schedule as noise CSV");
  gen->add_option("--model", gen_args.model, "off | periodic:P:D | poisson:R:D | generational[...]")
      ->required();
  gen->add_option("--horizon", gen_args.horizon, "Schedule length, e.g. 60s")->required();
  gen->add_option("--seed", gen_args.seed, "Seed")->capture_default_str();
  gen->add_option("--out", gen_args.out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream cli_out, cli_err;
    const int rc = app.exit(e, cli_out, cli_err);
    out << cli_out.str();
    err << cli_err.str();
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) CmdRun(run_args, out, err);
    if (*echo) CmdServeEcho(echo_args, err);
    if (*analyze) CmdAnalyze(analyze_args, out, err);
    if (*attribute) CmdAttribute(attr_args, out, err);
    if (*compare) CmdCompare(cmp_args, out, err);
    if (*gen) CmdGenNoise(gen_args, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace tailnoise
