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

#ifndef COBRA_FLOW_HPP
#define COBRA_FLOW_HPP

#include <cstdint>
#include <utility>
#include <vector>

namespace cobra {

// Successive-shortest-path min-cost max-flow with Dijkstra and potentials.
// Arc costs must be non-negative.  Fully deterministic: arcs are relaxed in
// insertion order and the heap breaks ties by node id.
class MinCostFlow {
 public:
  explicit MinCostFlow(int nodes);

  // Returns the arc id; the paired residual arc is id^1.
  int add_arc(int from, int to, long long cap, long long cost);

  // Pushes up to `limit` units from s to t; returns {flow, cost}.
  std::pair<long long, long long> solve(int s, int t,
                                        long long limit = kInf);

  long long flow_on(int arc_id) const;

  static constexpr long long kInf = (1LL << 62);

 private:
  struct Arc {
    int to;
    long long cap;
    long long cost;
  };
  int n_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> out_;
  std::vector<long long> potential_;
  std::vector<long long> dist_;
  std::vector<int> parent_arc_;
};

// Kuhn's augmenting-path maximum bipartite matching.  Left nodes are
// processed in ascending order and adjacency lists are tried in the given
// order, so the matching is deterministic.  Returns the matching size;
// match_of_right[r] is the matched left node or -1.
int max_bipartite_matching(const std::vector<std::vector<int>>& adj,
                           int right_count, std::vector<int>* match_of_right);

// Dinic max-flow specialised to the assignment-feasibility question: can
// every paper j get demand[j] distinct reviewers from `eligible[j]` without
// any reviewer r exceeding capacity[r]?
bool b_matching_feasible(const std::vector<std::vector<int>>& eligible,
                         const std::vector<int>& demand,
                         const std::vector<int>& capacity);

}  // namespace cobra

#endif  // COBRA_FLOW_HPP
