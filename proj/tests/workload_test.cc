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

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "tailnoise/errors.h"
#include "tailnoise/workload.h"

namespace tailnoise {
namespace {

TEST(ZipfianTest, SmallAnalyticPmf) {
  // n=3, s=1: H = 1 + 1/2 + 1/3 = 11/6.
  ZipfianDistribution z(3, 1.0);
  EXPECT_NEAR(z.normalization(), 11.0 / 6, 1e-12);
  EXPECT_NEAR(z.Pmf(1), 6.0 / 11, 1e-12);
  EXPECT_NEAR(z.Pmf(2), 3.0 / 11, 1e-12);
  EXPECT_NEAR(z.Pmf(3), 2.0 / 11, 1e-12);
  EXPECT_EQ(z.Pmf(0), 0);
  EXPECT_EQ(z.Pmf(4), 0);
}

TEST(ZipfianTest, DrawsStayInRangeAndMatchPmf) {
  ZipfianDistribution z(3, 1.0);
  Rng rng(11);
  std::map<uint64_t, int> counts;
  const int n = 200'000;
  for (int i = 0; i < n; ++i) ++counts[z.Next(rng)];
  ASSERT_EQ(counts.size(), 3u);
  for (uint64_t k = 1; k <= 3; ++k) {
    EXPECT_NEAR(counts[k] / double(n), z.Pmf(k), 0.005) << k;
  }
}

TEST(ZipfianTest, ZeroSkewIsUniformAndRejectsBadInput) {
  ZipfianDistribution z(4, 0.0);
  for (uint64_t k = 1; k <= 4; ++k) EXPECT_NEAR(z.Pmf(k), 0.25, 1e-12);
  EXPECT_THROW(ZipfianDistribution(0, 1), ValidationError);
  EXPECT_THROW(ZipfianDistribution(5, -0.5), ValidationError);
  EXPECT_THROW(ZipfianDistribution(5, NAN), ValidationError);
}

TEST(OpMixTest, NormalizesAndRejectsBadWeights) {
  OpMix m({{TxnType::kRead, 3}, {TxnType::kScan, 1}});
  EXPECT_DOUBLE_EQ(m.WeightOf(TxnType::kRead), 0.75);
  EXPECT_DOUBLE_EQ(m.WeightOf(TxnType::kDelete), 0);
  EXPECT_THROW(OpMix({}), ValidationError);
  EXPECT_THROW(OpMix({{TxnType::kRead, -1}}), ValidationError);
  EXPECT_THROW(OpMix({{TxnType::kRead, 0}}), ValidationError);
  EXPECT_THROW(OpMix({{TxnType::kRead, 1}, {TxnType::kRead, 1}}), ValidationError);
}

TEST(OpMixTest, ZeroWeightTypesAreNeverDrawn) {
  OpMix m({{TxnType::kRead, 0}, {TxnType::kScan, 1}, {TxnType::kDelete, 0}});
  Rng rng(1);
  for (int i = 0; i < 10'000; ++i) EXPECT_EQ(m.Sample(rng), TxnType::kScan);
}

TEST(OpMixTest, ListingOrderDoesNotChangeDraws) {
  OpMix a({{TxnType::kRead, 0.5}, {TxnType::kScan, 0.3}, {TxnType::kUpdate, 0.2}});
  OpMix b({{TxnType::kUpdate, 0.2}, {TxnType::kRead, 0.5}, {TxnType::kScan, 0.3}});
  Rng ra(5), rb(5);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(a.Sample(ra), b.Sample(rb));
}

TEST(YcsbGeneratorTest, RequestShapes) {
  YcsbOptions o;
  o.record_count = 1000;
  o.field_count = 3;
  o.field_length = 8;
  o.max_scan_length = 7;
  o.render_sql = true;
  auto keys = std::make_shared<ZipfianDistribution>(o.record_count, o.zipfian_s);
  YcsbGenerator g(o, keys, 2, 4, 99);
  int64_t last_insert = -1;
  for (int i = 0; i < 5000; ++i) {
    const Request r = g.Next();
    ASSERT_EQ(r.keys.size(), 1u);
    ASSERT_TRUE(r.sql_text.has_value());
    EXPECT_EQ(r.scan_length.has_value(), r.txn == TxnType::kScan);
    if (r.scan_length) {
      EXPECT_GE(*r.scan_length, 1);
      EXPECT_LE(*r.scan_length, 7);
    }
    const bool writes = r.txn == TxnType::kInsert || r.txn == TxnType::kUpdate ||
                        r.txn == TxnType::kReadModifyWrite;
    EXPECT_EQ(r.payload.size(), writes ? 3u : 0u);
    for (const auto& f : r.payload) EXPECT_EQ(f.size(), 8u);
    if (r.txn == TxnType::kInsert) {
      // Worker 2 of 4 inserts 1002, 1006, ...
      EXPECT_GE(r.keys[0], 1000);
      EXPECT_EQ((r.keys[0] - 1000) % 4, 2);
      EXPECT_GT(r.keys[0], last_insert);
      last_insert = r.keys[0];
    } else {
      EXPECT_GE(r.keys[0], 0);
      EXPECT_LT(r.keys[0], 1000);
    }
  }
  EXPECT_GE(last_insert, 1000);
}

TEST(YcsbGeneratorTest, DeterministicPerSeed) {
  YcsbOptions o;
  o.record_count = 100;
  auto keys = std::make_shared<ZipfianDistribution>(100, 0.99);
  YcsbGenerator a(o, keys, 0, 1, 7), b(o, keys, 0, 1, 7), c(o, keys, 0, 1, 8);
  bool differs = false;
  for (int i = 0; i < 200; ++i) {
    const Request ra = a.Next();
    EXPECT_EQ(ra, b.Next());
    differs |= !(ra == c.Next());
  }
  EXPECT_TRUE(differs);
}

TEST(YcsbGeneratorTest, RejectsForeignTypesAndMismatchedKeys) {
  YcsbOptions o;
  o.record_count = 10;
  o.mix = OpMix({{TxnType::kNewOrder, 1}});
  EXPECT_THROW(YcsbGenerator::Validate(o), ValidationError);
  YcsbOptions p;
  p.record_count = 10;
  EXPECT_THROW(YcsbGenerator(p, std::make_shared<ZipfianDistribution>(11, 1), 0, 1, 0),
               ValidationError);
}

TEST(YcsbSqlTest, RendersStatements) {
  Request r;
  r.txn = TxnType::kRead;
  r.keys = {42};
  EXPECT_EQ(RenderYcsbSql(r), "SELECT * FROM usertable WHERE ycsb_key = 42");
  r.txn = TxnType::kScan;
  r.scan_length = 5;
  EXPECT_EQ(RenderYcsbSql(r), "SELECT * FROM usertable WHERE ycsb_key >= 42 AND ycsb_key < 47");
  r.txn = TxnType::kUpdate;
  r.payload = {"a", "b"};
  EXPECT_EQ(RenderYcsbSql(r), "UPDATE usertable SET field1 = 'a', field2 = 'b' WHERE ycsb_key = 42");
  r.txn = TxnType::kNoOp;
  EXPECT_THROW(RenderYcsbSql(r), ValidationError);
  EXPECT_EQ(NoOpRequest().sql_text, ";");
}

TEST(TpccTest, WarehouseAssignmentIsDisjointWhenPossible) {
  const WarehouseBinding b = AssignWarehouses(10, 3);
  std::set<int32_t> seen;
  std::size_t total = 0;
  for (uint32_t w = 0; w < 3; ++w) {
    for (int32_t h : b.Owned(w)) seen.insert(h);
    total += b.Owned(w).size();
  }
  EXPECT_EQ(seen.size(), 10u);
  EXPECT_EQ(total, 10u);
  EXPECT_THROW(b.Owned(3), ValidationError);
  // More workers than warehouses: every worker gets exactly one.
  const WarehouseBinding c = AssignWarehouses(2, 5);
  for (uint32_t w = 0; w < 5; ++w) EXPECT_EQ(c.Owned(w).size(), 1u);
}

TEST(TpccTest, TargetsStayWithinOwnedWarehouses) {
  TpccOptions o;
  const WarehouseBinding b = AssignWarehouses(o.warehouses, 4);
  TpccGenerator g(o, b, 1, 3);
  const auto owned = b.Owned(1);
  for (int i = 0; i < 2000; ++i) {
    const Request r = g.Next();
    ASSERT_TRUE(r.tpcc.has_value());
    EXPECT_NE(std::find(owned.begin(), owned.end(), r.tpcc->warehouse_id), owned.end());
    EXPECT_GE(r.tpcc->district_id, 0);
    EXPECT_LT(r.tpcc->district_id, o.districts_per_warehouse);
    EXPECT_GE(r.tpcc->customer_id, 0);
    EXPECT_LT(r.tpcc->customer_id, o.customers_per_district);
  }
}

TEST(SeedTest, DerivedStreamsDiffer) {
  EXPECT_NE(DeriveSeed(1, 0), DeriveSeed(1, 1));
  EXPECT_NE(DeriveSeed(1, 0), DeriveSeed(2, 0));
  EXPECT_EQ(DeriveSeed(3, 4), DeriveSeed(3, 4));
  Rng rng(0);
  for (int i = 0; i < 1000; ++i) {
    const double u = UniformUnit(rng);
    EXPECT_GE(u, 0);
    EXPECT_LT(u, 1);
    const int64_t v = UniformInt(rng, -3, 3);
    EXPECT_GE(v, -3);
    EXPECT_LE(v, 3);
  }
}

}  // namespace
}  // namespace tailnoise
