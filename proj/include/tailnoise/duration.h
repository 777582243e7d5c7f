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
#include <string>
#include <string_view>

namespace tailnoise {

constexpr int64_t kNanosPerMicro = 1'000;
constexpr int64_t kNanosPerMilli = 1'000'000;
constexpr int64_t kNanosPerSecond = 1'000'000'000;

// Parses "<number>[ns|us|ms|s]" into integer nanoseconds. The number may
// carry a decimal fraction ("1.5ms"); the result is rounded to the nearest
// nanosecond. A bare integer is taken as nanoseconds.
// Throws ParseError on malformed input or a negative value.
int64_t ParseDuration(std::string_view text);

// Shortest exact rendering with a unit suffix, e.g. 50000000 -> "50ms".
std::string FormatDuration(int64_t ns);

}  // namespace tailnoise
