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

#include "tailnoise/workload.h"

#include <algorithm>
#include <cmath>

#include "tailnoise/errors.h"

namespace tailnoise {

uint64_t DeriveSeed(uint64_t seed, uint64_t stream) {
  // splitmix64 finalizer over the pair.
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int64_t UniformInt(Rng& rng, int64_t lo, int64_t hi) {
  if (hi < lo) throw ValidationError("UniformInt: empty range");
  const uint64_t span = static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo) + 1;
  if (span == 0) return static_cast<int64_t>(rng());  // full 64-bit range
  const uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return lo + static_cast<int64_t>(x % span);
}

OpMix::OpMix(std::vector<std::pair<TxnType, double>> weights)
    : raw_weights_(std::move(weights)) {
  if (raw_weights_.empty()) throw ValidationError("mix is empty");
  // Canonical order makes the draw sequence independent of how the mix was
  // listed (JSON objects, for one, come back sorted by key).
  std::stable_sort(raw_weights_.begin(), raw_weights_.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  weights_ = raw_weights_;
  double total = 0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const auto& [type, w] = weights_[i];
    if (!std::isfinite(w) || w < 0) {
      throw ValidationError("mix weight for " + std::string(type.label()) + " must be >= 0");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (weights_[j].first == type) {
        throw ValidationError("mix lists " + std::string(type.label()) + " twice");
      }
    }
    total += w;
  }
  if (!(total > 0)) throw ValidationError("mix weights sum to zero");
  double acc = 0;
  for (auto& [type, w] : weights_) {
    w /= total;
    acc += w;
    cumulative_.push_back(acc);
  }
  cumulative_.back() = 1.0;
}

OpMix OpMix::YcsbDefault() {
  return OpMix({{TxnType::kRead, 0.50},
                {TxnType::kInsert, 0.05},
                {TxnType::kScan, 0.15},
                {TxnType::kUpdate, 0.10},
                {TxnType::kDelete, 0.10},
                {TxnType::kReadModifyWrite, 0.10}});
}

OpMix OpMix::TpccDefault() {
  return OpMix({{TxnType::kNewOrder, 0.45},
                {TxnType::kPayment, 0.43},
                {TxnType::kOrderStatus, 0.04},
                {TxnType::kDelivery, 0.04},
                {TxnType::kStockLevel, 0.04}});
}

double OpMix::WeightOf(TxnType t) const {
  for (const auto& [type, w] : weights_) {
    if (type == t) return w;
  }
  return 0;
}

TxnType OpMix::Sample(Rng& rng) const {
  const double u = UniformUnit(rng);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  auto idx = static_cast<std::size_t>(it - cumulative_.begin());
  if (idx >= weights_.size()) idx = weights_.size() - 1;
  // Skip zero-weight entries that share a cumulative value with the next.
  while (weights_[idx].second == 0 && idx + 1 < weights_.size()) ++idx;
  return weights_[idx].first;
}

ZipfianDistribution::ZipfianDistribution(uint64_t n, double s) : n_(n), s_(s) {
  if (n == 0) throw ValidationError("zipfian: n must be >= 1");
  if (!std::isfinite(s) || s < 0) throw ValidationError("zipfian: s must be >= 0");
  cdf_.resize(n);
  long double acc = 0;
  for (uint64_t k = 1; k <= n; ++k) {
    acc += std::pow(static_cast<long double>(k), -static_cast<long double>(s));
    cdf_[k - 1] = static_cast<double>(acc);
  }
  normalization_ = static_cast<double>(acc);
  for (auto& c : cdf_) c = static_cast<double>(c / acc);
  cdf_.back() = 1.0;
}

double ZipfianDistribution::Pmf(uint64_t rank) const {
  if (rank < 1 || rank > n_) return 0;
  return std::pow(static_cast<double>(rank), -s_) / normalization_;
}

uint64_t ZipfianDistribution::Next(Rng& rng) const {
  const double u = UniformUnit(rng);
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto idx = static_cast<uint64_t>(it - cdf_.begin());
  return std::min(idx, n_ - 1) + 1;
}

Request NoOpRequest() {
  Request r;
  r.txn = TxnType::kNoOp;
  r.sql_text = ";";
  return r;
}

void YcsbGenerator::Validate(const YcsbOptions& options) {
  if (options.record_count == 0) throw ValidationError("ycsb: record_count must be > 0");
  if (options.max_scan_length < 1) throw ValidationError("ycsb: max_scan_length must be >= 1");
  if (options.field_count < 0 || options.field_length < 0) {
    throw ValidationError("ycsb: field sizes must be >= 0");
  }
  if (!std::isfinite(options.zipfian_s) || options.zipfian_s < 0) {
    throw ValidationError("ycsb: zipfian_s must be >= 0");
  }
  for (const auto& [type, w] : options.mix.weights()) {
    switch (type.id()) {
      case TxnType::kRead:
      case TxnType::kInsert:
      case TxnType::kScan:
      case TxnType::kUpdate:
      case TxnType::kDelete:
      case TxnType::kReadModifyWrite:
        break;
      default:
        throw ValidationError("ycsb mix cannot contain " + std::string(type.label()));
    }
  }
}

YcsbGenerator::YcsbGenerator(const YcsbOptions& options,
                             std::shared_ptr<const ZipfianDistribution> keys, uint32_t worker_id,
                             uint32_t workers, uint64_t seed)
    : options_(options),
      keys_(std::move(keys)),
      workers_(std::max<uint32_t>(workers, 1)),
      rng_(seed),
      next_insert_key_(static_cast<int64_t>(options.record_count) + worker_id) {
  Validate(options_);
  if (!keys_ || keys_->n() != options_.record_count) {
    throw ValidationError("ycsb: key distribution must cover record_count keys");
  }
}

std::string YcsbGenerator::RandomField() {
  static constexpr char kAlphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
  std::string field(static_cast<std::size_t>(options_.field_length), ' ');
  uint64_t bits = 0;
  int left = 0;
  for (auto& c : field) {
    if (left == 0) {
      bits = rng_();
      left = 10;
    }
    c = kAlphabet[(bits & 0x3f) % 62];
    bits >>= 6;
    --left;
  }
  return field;
}

Request YcsbGenerator::Next() {
  Request r;
  r.txn = options_.mix.Sample(rng_);
  if (r.txn == TxnType::kInsert) {
    r.keys.push_back(next_insert_key_);
    next_insert_key_ += workers_;
  } else {
    r.keys.push_back(static_cast<int64_t>(keys_->Next(rng_)) - 1);
  }
  if (r.txn == TxnType::kScan) {
    r.scan_length = static_cast<int32_t>(UniformInt(rng_, 1, options_.max_scan_length));
  }
  if (r.txn == TxnType::kInsert || r.txn == TxnType::kUpdate ||
      r.txn == TxnType::kReadModifyWrite) {
    r.payload.reserve(static_cast<std::size_t>(options_.field_count));
    for (int32_t i = 0; i < options_.field_count; ++i) r.payload.push_back(RandomField());
  }
  if (options_.render_sql) r.sql_text = RenderYcsbSql(r);
  return r;
}

namespace {

std::string UpdateSql(const Request& r) {
  std::string sql = "UPDATE usertable SET ";
  for (std::size_t i = 0; i < r.payload.size(); ++i) {
    if (i) sql += ", ";
    sql += "field" + std::to_string(i + 1) + " = '" + r.payload[i] + "'";
  }
  return sql + " WHERE ycsb_key = " + std::to_string(r.keys.at(0));
}

}  // namespace

std::string RenderYcsbSql(const Request& r) {
  const std::string key = std::to_string(r.keys.at(0));
  switch (r.txn.id()) {
    case TxnType::kRead:
      return "SELECT * FROM usertable WHERE ycsb_key = " + key;
    case TxnType::kScan:
      return "SELECT * FROM usertable WHERE ycsb_key >= " + key + " AND ycsb_key < " +
             std::to_string(r.keys.at(0) + r.scan_length.value_or(1));
    case TxnType::kDelete:
      return "DELETE FROM usertable WHERE ycsb_key = " + key;
    case TxnType::kUpdate:
      return UpdateSql(r);
    case TxnType::kInsert: {
      std::string sql = "INSERT INTO usertable VALUES (" + key;
      for (const auto& f : r.payload) sql += ", '" + f + "'";
      return sql + ")";
    }
    case TxnType::kReadModifyWrite:
      // Two statements in one simple query run as a single implicit transaction.
      return "SELECT * FROM usertable WHERE ycsb_key = " + key + "; " + UpdateSql(r);
    default:
      throw ValidationError("no YCSB statement for " + std::string(r.txn.label()));
  }
}

std::span<const int32_t> WarehouseBinding::Owned(uint32_t worker_id) const {
  if (worker_id >= owned_.size()) {
    throw ValidationError("worker " + std::to_string(worker_id) + " has no warehouse binding");
  }
  return owned_[worker_id];
}

WarehouseBinding AssignWarehouses(int32_t warehouses, uint32_t workers) {
  if (warehouses < 1) throw ValidationError("warehouses must be >= 1");
  if (workers < 1) throw ValidationError("workers must be >= 1");
  std::vector<std::vector<int32_t>> owned(workers);
  if (workers >= static_cast<uint32_t>(warehouses)) {
    for (uint32_t i = 0; i < workers; ++i) {
      owned[i].push_back(static_cast<int32_t>(i % static_cast<uint32_t>(warehouses)));
    }
  } else {
    for (int32_t w = 0; w < warehouses; ++w) {
      owned[static_cast<uint32_t>(w) % workers].push_back(w);
    }
  }
  return WarehouseBinding(std::move(owned));
}

TpccGenerator::TpccGenerator(const TpccOptions& options, const WarehouseBinding& binding,
                             uint32_t worker_id, uint64_t seed)
    : options_(options), rng_(seed) {
  const auto owned = binding.Owned(worker_id);
  warehouses_.assign(owned.begin(), owned.end());
  if (warehouses_.empty()) {
    throw ValidationError("worker " + std::to_string(worker_id) + " owns no warehouse");
  }
  if (options_.districts_per_warehouse < 1 || options_.customers_per_district < 1) {
    throw ValidationError("tpcc: district and customer counts must be >= 1");
  }
}

Request TpccGenerator::Next() {
  Request r;
  r.txn = options_.mix.Sample(rng_);
  TpccTarget target;
  target.warehouse_id =
      warehouses_.size() == 1
          ? warehouses_.front()
          : warehouses_[static_cast<std::size_t>(
                UniformInt(rng_, 0, static_cast<int64_t>(warehouses_.size()) - 1))];
  target.district_id = static_cast<int32_t>(UniformInt(rng_, 0, options_.districts_per_warehouse - 1));
  target.customer_id = static_cast<int32_t>(UniformInt(rng_, 0, options_.customers_per_district - 1));
  r.tpcc = target;
  return r;
}

}  // namespace tailnoise
