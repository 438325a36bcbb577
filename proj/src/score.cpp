// Copyright 2025 The cobra Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cobra/score.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace cobra {

Score score_from_double(double v) {
  return static_cast<Score>(std::llround(v * static_cast<double>(kScoreOne)));
}

double score_to_double(Score s) {
  return static_cast<double>(s) / static_cast<double>(kScoreOne);
}

bool parse_score(const std::string& text, Score* out) {
  if (text.empty()) return false;
  // Scientific notation falls back to strtod.
  if (text.find_first_of("eE") != std::string::npos) {
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || !(v >= 0.0) || !std::isfinite(v)) {
      return false;
    }
    *out = score_from_double(v);
    return true;
  }
  std::size_t pos = 0;
  Score whole = 0;
  bool any_digit = false;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
    whole = whole * 10 + (text[pos] - '0');
    if (whole > (1LL << 52)) return false;  // implausibly large similarity
    ++pos;
    any_digit = true;
  }
  Score frac = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int digits = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      int d = text[pos] - '0';
      if (digits < 9) {
        frac = frac * 10 + d;
      } else if (digits == 9 && d >= 5) {
        ++frac;  // round half-up on the tenth digit
      }
      ++digits;
      ++pos;
      any_digit = true;
    }
    for (; digits < 9; ++digits) frac *= 10;
  }
  if (!any_digit || pos != text.size()) return false;
  *out = whole * kScoreOne + frac;
  return true;
}

std::string format_score(Score s) {
  char buf[40];
  const char* sign = s < 0 ? "-" : "";
  Score a = s < 0 ? -s : s;
  std::snprintf(buf, sizeof(buf), "%s%lld.%09lld", sign,
                static_cast<long long>(a / kScoreOne),
                static_cast<long long>(a % kScoreOne));
  return buf;
}

}  // namespace cobra
