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

#ifndef COBRA_BASELINES_HPP
#define COBRA_BASELINES_HPP

#include "cobra/model.hpp"

namespace cobra {

// Score-driven baseline assigners.  Both require a valid instance with
// similarity scores and throw std::invalid_argument otherwise.

// Maximizes the total paper score (utilitarian social welfare) as a
// maximum-weight b-matching, solved exactly by min-cost flow.  Arc order is
// ascending (reviewer, paper), which fixes the tie-break among optima.
Assignment assign_max_usw(const Instance& inst);

struct MaxminStats {
  Score esw = 0;            // min paper score of the returned assignment
  bool certified = true;    // false when the node budget cut a search short
  long long nodes_used = 0;
};

// Maximizes the minimum paper score, with total score as a secondary
// objective among the threshold-optimal assignments (a max-min stand-in for
// leximin-style assigners; the refinement beyond the first minimum is
// deliberately limited to one utilitarian pass).
//
// The minimum is found by integer bisection over the fixed-point threshold;
// each feasibility question ("can every paper reach tau?") is decided by an
// exhaustive search with capacity-aware pruning, seeded from the max-USW
// assignment so the result never falls below the utilitarian baseline's
// minimum.  Searches that would exceed `node_budget` nodes mark the result
// uncertified and the threshold becomes a lower bound; within the budget
// the returned minimum is exactly optimal.
Assignment assign_maxmin_esw(const Instance& inst, MaxminStats* stats = nullptr,
                             long long node_budget = 4'000'000);

}  // namespace cobra

#endif  // COBRA_BASELINES_HPP
