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

#include <string>
#include <vector>

#include "json.hpp"
#include "tailnoise/analysis.h"
#include "tailnoise/model.h"

namespace tailnoise {

nlohmann::json RunMetaToJson(const RunMeta& meta);
// Throws ParseError on missing or mistyped fields.
RunMeta RunMetaFromJson(const nlohmann::json& j);

nlohmann::json SummaryToJson(const PercentileSummary& summary);
PercentileSummary SummaryFromJson(const nlohmann::json& j);

// Per-sample flags are reduced to the indices of overlapped samples.
nlohmann::json AttributionToJson(const AttributionReport& report);
nlohmann::json DistortionToJson(const DistortionReport& report);

// `t_ns,latency_ns,class` with class standard|extreme.
std::string EncodePlotPoints(const PlotSeries& series);
// `t_ns,mean_ns`.
std::string EncodeSlidingMean(const PlotSeries& series);
// `second,requests`.
std::string EncodeThroughput(const std::vector<uint64_t>& series);

}  // namespace tailnoise
