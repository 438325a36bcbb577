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

#ifndef COBRA_SCORE_HPP
#define COBRA_SCORE_HPP

#include <cstdint>
#include <string>

namespace cobra {

// Similarity scores are fixed-point decimals with 9 fractional digits:
// 1.0 == kScoreOne.  Welfare sums and strict-improvement comparisons are
// integer arithmetic, so equality and strictness never depend on float
// rounding.  Doubles appear only at reporting boundaries.
using Score = std::int64_t;

inline constexpr Score kScoreOne = 1'000'000'000;

Score score_from_double(double v);
double score_to_double(Score s);

// Parses a non-negative decimal literal ("0.25", "1", "3.5e-1") into
// fixed-point.  Digits past the ninth fractional place round half-up.
// Returns false on malformed or negative input.
bool parse_score(const std::string& text, Score* out);

// Fixed 9-digit rendering, e.g. "0.250000000".  Round-trips exactly
// through parse_score.
std::string format_score(Score s);

}  // namespace cobra

#endif  // COBRA_SCORE_HPP
