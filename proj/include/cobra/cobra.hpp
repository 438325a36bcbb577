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

#ifndef COBRA_COBRA_HPP
#define COBRA_COBRA_HPP

#include <iosfwd>
#include <vector>

#include "cobra/model.hpp"

namespace cobra {

// Core-based reviewer assignment.  Two stages: cycle elimination on the
// preference graph (a top-trading-cycles variant that handles multiple
// submissions and per-paper reviewer demand), then a repair pass that
// completes the leftover papers with greedy-graph cycles and topological
// three-way swaps.  Driven entirely by the rankings; similarity scores are
// never consulted.
//
// Tie-breaks, all deterministic and relied upon by the trace format:
//   - an incomplete agent drives her lowest-index incomplete submission;
//   - a complete agent points to the lowest-index incomplete agent;
//   - among preference-graph cycles, eliminate the one containing the
//     lowest-index agent that lies on any cycle;
//   - greedy-graph edges are labeled with the lowest qualifying paper, and
//     the cycle closed by the first back edge of a DFS from the lowest
//     node (neighbours in ascending order) is eliminated;
//   - agents completing in the same round are ordered by index;
//   - the topological order puts sources first, ties by agent index;
//   - repair-swap candidates are scanned in ascending (agent, paper) order.

// Out-degree <= 1 digraph: each incomplete agent points to the best-ranked
// agent that can still take her chosen paper; complete agents point to an
// incomplete one to keep cycles discoverable.
struct PreferenceGraph {
  std::vector<int> target;        // per agent, -1 if none
  std::vector<int> chosen_paper;  // driving paper per incomplete agent, else -1
};

// Digraph on the incomplete agents: an edge (i, i') exists when i' could
// review at least one incompletely assigned paper of i.
struct GreedyGraph {
  std::vector<int> nodes;  // ascending agent ids
  // Per node (indexed as in `nodes`): (target agent, label paper), targets
  // ascending.
  std::vector<std::vector<std::pair<int, int>>> edges;
};

struct TtcOutcome {
  PartialAssignment partial;
  std::vector<int> incomplete_agents;  // U, ascending
  std::vector<int> last_completed;     // L, in completion order
};

struct CobraStats {
  long long ttc_rounds = 0;
  long long phase1_rounds = 0;
  long long phase2_swaps = 0;
  // Number of per-agent load/received equality checks that passed.
  long long balance_checks = 0;
};

PreferenceGraph build_preference_graph(const PaddedInstance& padded,
                                       const PartialAssignment& part);

GreedyGraph build_greedy_graph(const PaddedInstance& padded,
                               const PartialAssignment& part,
                               const std::vector<int>& incomplete_agents);

// Eliminates preference-graph cycles until none remain.  Returns the
// partial assignment, U, and L; |U| <= k_p is asserted.
TtcOutcome pra_ttc(const PaddedInstance& padded, std::ostream* trace = nullptr,
                   CobraStats* stats = nullptr);

// Completes the partial assignment.  Phase 1 eliminates greedy-graph
// cycles; phase 2 walks the topological order and performs three-way
// rewires.  Requires a non-empty U; missing swap candidates indicate an
// internal bug and throw std::logic_error.
Assignment filling_gaps(const PaddedInstance& padded, TtcOutcome outcome,
                        std::ostream* trace = nullptr,
                        CobraStats* stats = nullptr);

// Pad, run both stages, strip dummy papers, and return a valid assignment
// over the original instance.  Throws std::invalid_argument when the
// instance is invalid.
Assignment run_cobra(const Instance& inst, std::ostream* trace = nullptr,
                     CobraStats* stats = nullptr);

}  // namespace cobra

#endif  // COBRA_COBRA_HPP
