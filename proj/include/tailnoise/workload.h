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
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tailnoise/model.h"

namespace tailnoise {

// Generator state. Same seed, same stream.
using Rng = std::mt19937_64;

// Derives an independent stream seed for `stream` (e.g. a worker index).
uint64_t DeriveSeed(uint64_t seed, uint64_t stream);

// Uniform double in [0, 1) from the top 53 bits of one draw.
double UniformUnit(Rng& rng);

// Uniform integer in [lo, hi], unbiased.
int64_t UniformInt(Rng& rng, int64_t lo, int64_t hi);

// Weighted choice over transaction types. Weights are normalized on
// construction, so {Read: 1} and percentage weights are both accepted. Entries
// are kept in TxnType order regardless of the order given.
class OpMix {
 public:
  // Throws ValidationError on a negative or non-finite weight, a repeated
  // type, or a zero total.
  explicit OpMix(std::vector<std::pair<TxnType, double>> weights);

  // 50% read, 5% insert, 15% scan, 10% update, 10% delete, 10% RMW.
  static OpMix YcsbDefault();
  // TPC-C minimum mix: NewOrder 45, Payment 43, the rest 4 each.
  static OpMix TpccDefault();

  // Normalized weights.
  const std::vector<std::pair<TxnType, double>>& weights() const { return weights_; }
  // Weights as given to the constructor; serializing these keeps a
  // re-loaded mix bit-identical.
  const std::vector<std::pair<TxnType, double>>& raw_weights() const { return raw_weights_; }
  double WeightOf(TxnType t) const;

  TxnType Sample(Rng& rng) const;

 private:
  std::vector<std::pair<TxnType, double>> weights_;
  std::vector<std::pair<TxnType, double>> raw_weights_;
  std::vector<double> cumulative_;
};

// Zipfian distribution over ranks 1..n with P(k) = k^-s / H(n, s).
// Sampling inverts the precomputed CDF by binary search. The table is
// immutable and can be shared by every worker's generator.
class ZipfianDistribution {
 public:
  // Throws ValidationError if n == 0 or s is negative or non-finite.
  ZipfianDistribution(uint64_t n, double s);

  uint64_t n() const { return n_; }
  double s() const { return s_; }
  double normalization() const { return normalization_; }
  double Pmf(uint64_t rank) const;

  uint64_t Next(Rng& rng) const;

 private:
  uint64_t n_;
  double s_;
  double normalization_ = 0;
  std::vector<double> cdf_;
};

struct TpccTarget {
  int32_t warehouse_id = 0;
  int32_t district_id = 0;
  int32_t customer_id = 0;

  friend bool operator==(const TpccTarget&, const TpccTarget&) = default;
};

struct Request {
  TxnType txn;
  // Record ids for key-value workloads. Scans carry their first key.
  std::vector<int64_t> keys;
  // Present iff txn is Scan.
  std::optional<int32_t> scan_length;
  // Field values for Insert, Update and ReadModifyWrite.
  std::vector<std::string> payload;
  std::optional<TpccTarget> tpcc;
  std::optional<std::string> sql_text;

  friend bool operator==(const Request&, const Request&) = default;
};

// Anything that hands a worker its next request.
class RequestSource {
 public:
  virtual ~RequestSource() = default;
  virtual Request Next() = 0;
};

// The empty statement ';' tagged NoOp.
Request NoOpRequest();

class NoOpSource final : public RequestSource {
 public:
  Request Next() override { return NoOpRequest(); }
};

struct YcsbOptions {
  uint64_t record_count = 1'200'000;
  OpMix mix = OpMix::YcsbDefault();
  double zipfian_s = 0.99;
  int32_t max_scan_length = 100;
  int32_t field_count = 10;
  int32_t field_length = 100;
  bool render_sql = false;
};

// Per-worker YCSB request stream. Inserts draw fresh ids from
// record_count + worker_id, stepping by `workers`, so workers never collide.
class YcsbGenerator final : public RequestSource {
 public:
  YcsbGenerator(const YcsbOptions& options, std::shared_ptr<const ZipfianDistribution> keys,
                uint32_t worker_id, uint32_t workers, uint64_t seed);

  Request Next() override;

  // Mix, record count, skew and field sizes must be sane.
  static void Validate(const YcsbOptions& options);

 private:
  std::string RandomField();

  YcsbOptions options_;
  std::shared_ptr<const ZipfianDistribution> keys_;
  uint32_t workers_;
  Rng rng_;
  int64_t next_insert_key_;
};

// Renders the statement OLTPBench-style YCSB issues against `usertable`.
std::string RenderYcsbSql(const Request& request);

// Warehouses owned by each worker.
class WarehouseBinding {
 public:
  explicit WarehouseBinding(std::vector<std::vector<int32_t>> owned) : owned_(std::move(owned)) {}

  uint32_t workers() const { return static_cast<uint32_t>(owned_.size()); }
  // Throws ValidationError for an unknown worker.
  std::span<const int32_t> Owned(uint32_t worker_id) const;

 private:
  std::vector<std::vector<int32_t>> owned_;
};

// With at least as many workers as warehouses, worker i gets warehouse
// i mod warehouses. Otherwise worker i owns every w with w mod workers == i.
WarehouseBinding AssignWarehouses(int32_t warehouses, uint32_t workers);

struct TpccOptions {
  int32_t warehouses = 10;
  int32_t districts_per_warehouse = 10;
  int32_t customers_per_district = 3000;
  OpMix mix = OpMix::TpccDefault();
};

// Transaction-mix stream for one TPC-C worker. Warehouse ids come from the
// worker's binding; district and customer ids are uniform.
class TpccGenerator final : public RequestSource {
 public:
  TpccGenerator(const TpccOptions& options, const WarehouseBinding& binding, uint32_t worker_id,
                uint64_t seed);

  Request Next() override;

 private:
  TpccOptions options_;
  std::vector<int32_t> warehouses_;
  Rng rng_;
};

}  // namespace tailnoise
