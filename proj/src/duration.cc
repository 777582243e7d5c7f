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

#include "tailnoise/duration.h"

#include <cctype>
#include <cmath>
#include <limits>

#include "tailnoise/errors.h"

namespace tailnoise {

int64_t ParseDuration(std::string_view text) {
  const std::string original(text);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw ParseError("empty duration");

  int64_t unit = 1;
  if (text.ends_with("ns")) {
    text.remove_suffix(2);
  } else if (text.ends_with("us")) {
    unit = kNanosPerMicro;
    text.remove_suffix(2);
  } else if (text.ends_with("ms")) {
    unit = kNanosPerMilli;
    text.remove_suffix(2);
  } else if (text.ends_with("s")) {
    unit = kNanosPerSecond;
    text.remove_suffix(1);
  }
  if (text.empty()) throw ParseError("duration '" + original + "' has no magnitude");

  // Integer and fraction parts are accumulated separately so that values
  // like "0.1s" come out exact.
  int64_t whole = 0;
  std::size_t i = 0;
  bool any_digit = false;
  for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
    any_digit = true;
    if (whole > (std::numeric_limits<int64_t>::max() / unit - 9) / 10) {
      throw ParseError("duration '" + original + "' overflows");
    }
    whole = whole * 10 + (text[i] - '0');
  }
  int64_t frac_ns = 0;
  if (i < text.size() && text[i] == '.') {
    ++i;
    int64_t scale = unit;
    long double rest = 0;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      any_digit = true;
      const int digit = text[i] - '0';
      if (scale >= 10) {
        scale /= 10;
        frac_ns += digit * scale;
      } else {
        rest += digit * static_cast<long double>(scale) / 10.0L;
        scale = 0;
      }
    }
    frac_ns += std::llround(rest);
  }
  if (!any_digit || i != text.size()) {
    throw ParseError("malformed duration '" + original + "'");
  }
  return whole * unit + frac_ns;
}

std::string FormatDuration(int64_t ns) {
  if (ns != 0 && ns % kNanosPerSecond == 0) return std::to_string(ns / kNanosPerSecond) + "s";
  if (ns != 0 && ns % kNanosPerMilli == 0) return std::to_string(ns / kNanosPerMilli) + "ms";
  if (ns != 0 && ns % kNanosPerMicro == 0) return std::to_string(ns / kNanosPerMicro) + "us";
  return std::to_string(ns) + "ns";
}

}  // namespace tailnoise
