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

#include "tailnoise/config.h"

#include <cmath>
#include <limits>
#include <set>

#include "tailnoise/duration.h"
#include "tailnoise/errors.h"
#include "tailnoise/file_util.h"

namespace tailnoise {

using nlohmann::json;

std::string_view BenchmarkLabel(BenchmarkKind k) {
  switch (k) {
    case BenchmarkKind::kNoOp:
      return "noop";
    case BenchmarkKind::kYcsb:
      return "ycsb";
    case BenchmarkKind::kTpcc:
      return "tpcc";
  }
  return "?";
}

std::string_view BackendLabel(BackendKind k) {
  switch (k) {
    case BackendKind::kStub:
      return "stub";
    case BackendKind::kEcho:
      return "echo";
    case BackendKind::kSql:
      return "sql";
  }
  return "?";
}

namespace {

// Reads fields of one JSON object and rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  ~ObjectReader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(Path(key) + ": unknown key");
    }
  }

  const json* Get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  std::string Path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void String(const std::string& key, std::string& out) {
    if (const json* v = Get(key)) {
      if (!v->is_string()) throw ConfigError(Path(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }

  template <typename Int>
  void Integer(const std::string& key, Int& out) {
    if (const json* v = Get(key)) {
      if (!v->is_number_integer()) throw ConfigError(Path(key) + ": expected an integer");
      if (v->is_number_unsigned()) {
        const auto u = v->get<uint64_t>();
        if (u > static_cast<uint64_t>(std::numeric_limits<Int>::max())) {
          throw ConfigError(Path(key) + ": out of range");
        }
        out = static_cast<Int>(u);
      } else {
        const auto s = v->get<int64_t>();
        if (s < static_cast<int64_t>(std::numeric_limits<Int>::min()) ||
            (s > 0 && static_cast<uint64_t>(s) > static_cast<uint64_t>(std::numeric_limits<Int>::max()))) {
          throw ConfigError(Path(key) + ": out of range");
        }
        out = static_cast<Int>(s);
      }
    }
  }

  void Number(const std::string& key, double& out) {
    if (const json* v = Get(key)) {
      if (!v->is_number()) throw ConfigError(Path(key) + ": expected a number");
      out = v->get<double>();
    }
  }

  void Duration(const std::string& key, int64_t& out) {
    if (const json* v = Get(key)) {
      if (v->is_number_integer()) {
        out = v->get<int64_t>();
      } else if (v->is_string()) {
        try {
          out = ParseDuration(v->get<std::string>());
        } catch (const ParseError& e) {
          throw ConfigError(Path(key) + ": " + e.what());
        }
      } else {
        throw ConfigError(Path(key) + ": expected a duration such as \"10s\" or integer ns");
      }
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

ServiceModel ServiceFromJson(const json& j) {
  ObjectReader r(j, "backend.service");
  std::string kind = "fixed";
  r.String("kind", kind);
  ServiceModel m;
  if (kind == "fixed") {
    m = ServiceModel::Fixed(100'000);
    r.Duration("duration", m.fixed_ns);
  } else if (kind == "lognormal") {
    m = ServiceModel::Lognormal(0, 0);
    r.Number("mu", m.mu);
    r.Number("sigma", m.sigma);
  } else if (kind == "bimodal") {
    m = ServiceModel::Bimodal(0, 0, 0);
    r.Duration("fast", m.fast_ns);
    r.Duration("slow", m.slow_ns);
    r.Number("p_slow", m.p_slow);
  } else {
    throw ConfigError("backend.service.kind: expected fixed, lognormal or bimodal");
  }
  return m;
}

json ServiceToJson(const ServiceModel& m) {
  switch (m.kind) {
    case ServiceModel::Kind::kFixed:
      return {{"kind", "fixed"}, {"duration", m.fixed_ns}};
    case ServiceModel::Kind::kLognormal:
      return {{"kind", "lognormal"}, {"mu", m.mu}, {"sigma", m.sigma}};
    case ServiceModel::Kind::kBimodal:
      return {{"kind", "bimodal"}, {"fast", m.fast_ns}, {"slow", m.slow_ns}, {"p_slow", m.p_slow}};
  }
  return {};
}

Endpoint EndpointFromString(const std::string& text, const std::string& path) {
  try {
    return ParseEndpoint(text);
  } catch (const ParseError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

BackendConfig BackendFromJson(const json& j) {
  ObjectReader r(j, "backend");
  BackendConfig b;
  std::string kind = "stub";
  r.String("kind", kind);
  if (kind == "stub") {
    b.kind = BackendKind::kStub;
    if (const json* s = r.Get("service")) b.service = ServiceFromJson(*s);
    r.Duration("spin_window", b.spin_window_ns);
  } else if (kind == "echo") {
    b.kind = BackendKind::kEcho;
    std::string address;
    r.String("address", address);
    if (!address.empty()) b.echo_address = EndpointFromString(address, "backend.address");
    r.Duration("reply_delay", b.echo_reply_delay_ns);
  } else if (kind == "sql") {
    b.kind = BackendKind::kSql;
    std::string address = b.sql.server.ToString();
    r.String("address", address);
    b.sql.server = EndpointFromString(address, "backend.address");
    r.String("user", b.sql.user);
    r.String("database", b.sql.database);
    std::string password;
    r.String("password", password);
    if (!password.empty()) b.sql.password = password;
    r.String("isolation", b.sql.isolation);
  } else {
    throw ConfigError("backend.kind: expected stub, echo or sql");
  }
  return b;
}

json BackendToJson(const BackendConfig& b) {
  switch (b.kind) {
    case BackendKind::kStub:
      return {{"kind", "stub"}, {"service", ServiceToJson(b.service)}, {"spin_window", b.spin_window_ns}};
    case BackendKind::kEcho: {
      json j = {{"kind", "echo"}, {"reply_delay", b.echo_reply_delay_ns}};
      if (b.echo_address) j["address"] = b.echo_address->ToString();
      return j;
    }
    case BackendKind::kSql: {
      json j = {{"kind", "sql"},
                {"address", b.sql.server.ToString()},
                {"user", b.sql.user},
                {"database", b.sql.database},
                {"isolation", b.sql.isolation}};
      if (b.sql.password) j["password"] = *b.sql.password;
      return j;
    }
  }
  return {};
}

OpMix MixFromJson(const json& j, const std::string& path) {
  if (!j.is_object() || j.empty()) throw ConfigError(path + ": expected a non-empty object");
  std::vector<std::pair<TxnType, double>> weights;
  for (const auto& [label, w] : j.items()) {
    if (!w.is_number()) throw ConfigError(path + "." + label + ": expected a number");
    try {
      weights.emplace_back(TxnType::FromLabel(label), w.get<double>());
    } catch (const ValidationError& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }
  try {
    return OpMix(std::move(weights));
  } catch (const ValidationError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

json MixToJson(const OpMix& mix) {
  json j = json::object();
  for (const auto& [type, w] : mix.raw_weights()) j[std::string(type.label())] = w;
  return j;
}

void WorkloadFromJson(const json& j, BenchmarkConfig& c) {
  ObjectReader r(j, "workload");
  r.Integer("record_count", c.ycsb.record_count);
  r.Number("zipfian_s", c.ycsb.zipfian_s);
  r.Integer("max_scan_length", c.ycsb.max_scan_length);
  r.Integer("field_count", c.ycsb.field_count);
  r.Integer("field_length", c.ycsb.field_length);
  r.Integer("warehouses", c.tpcc.warehouses);
  r.Integer("districts_per_warehouse", c.tpcc.districts_per_warehouse);
  r.Integer("customers_per_district", c.tpcc.customers_per_district);
  if (const json* mix = r.Get("mix")) {
    if (c.benchmark == BenchmarkKind::kYcsb) {
      c.ycsb.mix = MixFromJson(*mix, "workload.mix");
    } else if (c.benchmark == BenchmarkKind::kTpcc) {
      c.tpcc.mix = MixFromJson(*mix, "workload.mix");
    } else {
      throw ConfigError("workload.mix: the noop benchmark has no mix");
    }
  }
}

void NoiseFromJson(const json& j, BenchmarkConfig& c) {
  if (j.is_string()) {
    try {
      c.noise = ParsePauseModel(j.get<std::string>());
    } catch (const ParseError& e) {
      throw ConfigError(std::string("noise: ") + e.what());
    }
    return;
  }
  ObjectReader r(j, "noise");
  std::string model = "off";
  r.String("model", model);
  try {
    c.noise = ParsePauseModel(model);
  } catch (const ParseError& e) {
    throw ConfigError(std::string("noise.model: ") + e.what());
  }
  std::string point(InjectPointLabel(c.noise.inject_point));
  r.String("inject_point", point);
  try {
    c.noise.inject_point = ParseInjectPoint(point);
  } catch (const ParseError& e) {
    throw ConfigError(std::string("noise.inject_point: ") + e.what());
  }
}

}  // namespace

void BenchmarkConfig::Validate() const {
  try {
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (warmup_ns < 0) throw ConfigError("warmup must be >= 0");
    if (measure_ns <= 0) throw ConfigError("measure must be > 0");
    if (!(error_threshold >= 0 && error_threshold <= 1)) {
      throw ConfigError("error_threshold must be in [0, 1]");
    }
    for (int cpu : cpu_affinity) {
      if (cpu < 0) throw ConfigError("cpu_affinity entries must be >= 0");
    }
    noise.Validate();
    switch (backend.kind) {
      case BackendKind::kStub:
        backend.service.Validate();
        if (backend.spin_window_ns < 0) throw ConfigError("backend.spin_window must be >= 0");
        break;
      case BackendKind::kEcho:
        if (backend.echo_reply_delay_ns < 0) throw ConfigError("backend.reply_delay must be >= 0");
        break;
      case BackendKind::kSql:
        if (benchmark == BenchmarkKind::kTpcc) {
          throw ConfigError("the sql backend has no TPC-C statements; use stub or echo");
        }
        break;
    }
    if (benchmark == BenchmarkKind::kYcsb) YcsbGenerator::Validate(ycsb);
    if (benchmark == BenchmarkKind::kTpcc) {
      if (tpcc.warehouses < 1) throw ConfigError("workload.warehouses must be >= 1");
      if (tpcc.districts_per_warehouse < 1 || tpcc.customers_per_district < 1) {
        throw ConfigError("workload district and customer counts must be >= 1");
      }
      for (const auto& [type, w] : tpcc.mix.weights()) {
        if (type.id() < TxnType::kNewOrder || type.id() > TxnType::kStockLevel) {
          throw ConfigError("tpcc mix cannot contain " + std::string(type.label()));
        }
      }
    }
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
}

BenchmarkConfig ConfigFromJson(const json& j) {
  BenchmarkConfig c;
  {
    ObjectReader r(j, "");
    std::string benchmark = "noop";
    r.String("benchmark", benchmark);
    if (benchmark == "noop") {
      c.benchmark = BenchmarkKind::kNoOp;
    } else if (benchmark == "ycsb") {
      c.benchmark = BenchmarkKind::kYcsb;
    } else if (benchmark == "tpcc") {
      c.benchmark = BenchmarkKind::kTpcc;
    } else {
      throw ConfigError("benchmark: expected noop, ycsb or tpcc");
    }
    if (const json* b = r.Get("backend")) c.backend = BackendFromJson(*b);
    r.Integer("workers", c.workers);
    r.Duration("warmup", c.warmup_ns);
    r.Duration("measure", c.measure_ns);
    r.Integer("seed", c.seed);
    if (const json* w = r.Get("workload")) WorkloadFromJson(*w, c);
    if (const json* n = r.Get("noise")) NoiseFromJson(*n, c);
    if (const json* a = r.Get("cpu_affinity")) {
      if (!a->is_array()) throw ConfigError("cpu_affinity: expected an array");
      for (const auto& cpu : *a) {
        if (!cpu.is_number_integer()) throw ConfigError("cpu_affinity: expected integers");
        c.cpu_affinity.push_back(cpu.get<int>());
      }
    }
    r.Number("error_threshold", c.error_threshold);
  }
  c.ycsb.render_sql = c.backend.kind == BackendKind::kSql;
  c.Validate();
  return c;
}

json ConfigToJson(const BenchmarkConfig& c) {
  json workload = {
      {"record_count", c.ycsb.record_count},
      {"zipfian_s", c.ycsb.zipfian_s},
      {"max_scan_length", c.ycsb.max_scan_length},
      {"field_count", c.ycsb.field_count},
      {"field_length", c.ycsb.field_length},
      {"warehouses", c.tpcc.warehouses},
      {"districts_per_warehouse", c.tpcc.districts_per_warehouse},
      {"customers_per_district", c.tpcc.customers_per_district},
  };
  if (c.benchmark == BenchmarkKind::kYcsb) workload["mix"] = MixToJson(c.ycsb.mix);
  if (c.benchmark == BenchmarkKind::kTpcc) workload["mix"] = MixToJson(c.tpcc.mix);
  return {
      {"benchmark", BenchmarkLabel(c.benchmark)},
      {"backend", BackendToJson(c.backend)},
      {"workers", c.workers},
      {"warmup", c.warmup_ns},
      {"measure", c.measure_ns},
      {"seed", c.seed},
      {"workload", workload},
      {"noise",
       {{"model", c.noise.Describe()}, {"inject_point", InjectPointLabel(c.noise.inject_point)}}},
      {"cpu_affinity", c.cpu_affinity},
      {"error_threshold", c.error_threshold},
  };
}

BenchmarkConfig LoadConfig(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(ReadFile(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  if (j.is_object() && j.contains("config") && j.contains("run_meta")) return ConfigFromJson(j["config"]);
  return ConfigFromJson(j);
}

}  // namespace tailnoise
